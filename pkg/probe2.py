"""Second probe round: biperiodic windows, crossover shape, IPR breakdown, C11/C13."""
import time

import numpy as np

import fibrotor as fr
from fibrotor.analysis import CrossoverCriteria, detect_crossover, local_slope, plateau_stats
from fibrotor.evolve import EvolutionConfig, LogPolicy, SplitStepPropagator, run_trajectory
from fibrotor.hilbert import BasisWindow, gaussian_state, kick_matrix_bessel, momentum_eigenstate
from fibrotor.kickseq import KickSequenceSpec, kick_amplitudes


def run(kind, tau, k1, k2, steps, basis, l0=0, initial="eigenstate", seed=None, ppd=24, leak=1e-8):
    w = BasisWindow(l0, basis)
    spec = KickSequenceSpec(kind, k1, k2, seed=seed)
    cfg = EvolutionConfig(tau=tau, spec=spec, window=w, n_steps=steps,
                          log_policy=LogPolicy("log_spaced", points_per_decade=ppd),
                          leakage_tol=leak)
    state = momentum_eigenstate(w, l0) if initial == "eigenstate" else gaussian_state(w, l0)
    t0 = time.time()
    tr = run_trajectory(cfg, state)
    return tr, time.time() - t0


# --- biperiodic at bigger windows
for tau, basis in ((1.0, 16384), (5.0, 16384)):
    tr, wall = run("biperiodic", tau, 10.0, 12.0, 10_000, basis)
    if tr.ok:
        m1 = tr.energies[(tr.ns >= 1000) & (tr.ns <= 10_000)].max()
        m2 = tr.energies[(tr.ns >= 100) & (tr.ns <= 1000)].mean()
        print(f"biperiodic tau={tau} R={basis}: ok wall={wall:.0f}s Eend={tr.energies[-1]:.4g} "
              f"max/mean={m1/m2:.2f}", flush=True)
    else:
        print(f"biperiodic tau={tau} R={basis}: FAIL@{tr.failure['step']} leak={tr.failure['leakage']:.1e}", flush=True)

# --- C6 with relaxed guard: does it plateau and keep norm?
tr, wall = run("constant", 1.0, 15.0, 15.0, 10_000, 4096, leak=1e-6)
if tr.ok:
    from fibrotor.analysis import fit_growth
    s, e = fit_growth(tr, 2000, 10_000)
    print(f"C6 relaxed-guard: ok slope={s:.4f}+-{e:.4f} drift={tr.norm_drift:.1e} Eend={tr.energies[-1]:.4g}", flush=True)
else:
    print(f"C6 relaxed-guard FAIL@{tr.failure['step']} leak={tr.failure['leakage']:.1e}", flush=True)

# --- tau=0.05 crossover: trace shape and detector variants
tr05, _ = run("fibonacci", 0.05, 10.0, 12.0, 200_000, 4096)
ns, es = tr05.ns, tr05.energies
print("\ntau=0.05 trace (N, E, trailing9 median/3ref, local slope):")
ref, _ = plateau_stats(tr05, 1000, 10_000)
for i in range(8, ns.size):
    tn, te = ns[i-8:i+1], es[i-8:i+1]
    med = float(np.median(te))
    sl = local_slope(tn, te)
    if ns[i] > 3000:
        print(f"  N={ns[i]:7d} E={es[i]:9.1f} med={med:9.1f} med/3ref={med/(3*ref):6.2f} slope={sl:+.2f}")
print(f"plateau_ref[1e3,1e4]={ref:.1f}")
for n_lo, n_hi in ((300, 3000), (1000, 10000), (2000, 20000)):
    r2, _ = plateau_stats(tr05, n_lo, n_hi)
    cx = detect_crossover(tr05, r2)
    print(f"  ref[{n_lo},{n_hi}]={r2:.0f} -> crossover {cx}")

# spectral plateau as reference
wsp = BasisWindow(0, 512)
_, h05 = fr.fibonacci_propagator(10.0, 12.0, 0.05, wsp)
sd05 = fr.diagonalize(h05)
plat05 = fr.plateau_estimate(sd05, 0)
print(f"  spectral plateau(tau=0.05,R=512) = {plat05:.1f} -> crossover {detect_crossover(tr05, plat05)}")

# --- C12 breakdown
w1024 = BasisWindow(0, 1024)
_, h = fr.fibonacci_propagator(10.0, 12.0, 0.01, w1024)
sd = fr.diagonalize(h)
prof = fr.localization_profile(sd)
ipr_ok = prof.ipr >= 50 / 1024
tail_ok = prof.tail_rate < 0
print(f"\nC12: ipr_ok={ipr_ok.mean():.3f} tail_ok={np.nanmean(tail_ok):.3f} "
      f"tail_nan={np.isnan(prof.tail_rate).mean():.3f} both={(ipr_ok & tail_ok).mean():.3f}")
bad = ~ipr_ok
print(f"C12: failing-IPR peaks |l| range: {np.abs(prof.peak_l[bad]).min():.0f}..{np.abs(prof.peak_l[bad]).max():.0f}; "
      f"count={bad.sum()}; IPR*R of failures: {np.sort(prof.ipr[bad]*1024)[:5]}...{np.sort(prof.ipr[bad]*1024)[-5:]}")

# --- C11: effective-propagator convergence
w11 = BasisWindow(0, 1024)
psi0 = gaussian_state(w11, 0).amplitudes
F15 = 987
print("\nC11 residuals ||U_fi^F15 psi - U_exact psi||:")
for tau in (0.02, 0.01, 0.005):
    u_fi, h_fi = fr.fibonacci_propagator(10.0, 12.0, tau, w11)
    sdf = fr.diagonalize(h_fi)
    proj = sdf.vectors.conj().T @ psi0
    psi_eff = sdf.vectors @ (np.exp(-1j * sdf.energies * F15) * proj)
    prop = SplitStepPropagator(w11, tau)
    amps = kick_amplitudes(KickSequenceSpec("fibonacci", 10.0, 12.0), F15)
    psi_ex = psi0.copy()
    for a in amps:
        psi_ex = prop.step_amplitudes(psi_ex, a)
    resid = float(np.linalg.norm(psi_eff - psi_ex))
    print(f"  tau={tau}: {resid:.4e}", flush=True)

# --- C13: L-operator residual slopes
from fibrotor.effham import _build_L_variant
w13 = BasisWindow(0, 256)
K = 10.0
states = [gaussian_state(w13, l0).amplitudes for l0 in (0, -3, 4)]
for factor, tag in ((1/6, "K^2/6"), (1/12, "K^2/12")):
    taus = (0.04, 0.02, 0.01)
    resids = []
    for tau in taus:
        L = _build_L_variant(K, tau, w13, factor)
        sdl = fr.diagonalize(L)
        UL = (sdl.vectors * np.exp(-1j * sdl.energies)) @ sdl.vectors.conj().T
        free = np.exp(-0.5j * tau * w13.l_values().astype(float) ** 2)
        U2 = (free[:, None] * kick_matrix_bessel(w13, K).matrix)
        resids.append(max(float(np.linalg.norm((UL - U2) @ s)) for s in states))
    sl = np.polyfit(np.log(taus), np.log(resids), 1)[0]
    print(f"C13 {tag}: residuals={['%.3e' % r for r in resids]} slope={sl:.3f}", flush=True)

print("PROBE2 DONE", flush=True)
