"""One-off probe of the acceptance-critical dynamics (not part of the package)."""
import time

import numpy as np

import fibrotor as fr
from fibrotor.analysis import detect_crossover, fit_growth, plateau_stats, CrossoverCriteria
from fibrotor.evolve import EvolutionConfig, LogPolicy, run_trajectory
from fibrotor.hilbert import BasisWindow, gaussian_state, momentum_eigenstate
from fibrotor.kickseq import KickSequenceSpec


def run(kind, tau, k1, k2, steps, basis, l0=0, initial="eigenstate", seed=None, ppd=24):
    w = BasisWindow(l0, basis)
    spec = KickSequenceSpec(kind, k1, k2, seed=seed)
    cfg = EvolutionConfig(tau=tau, spec=spec, window=w, n_steps=steps,
                          log_policy=LogPolicy("log_spaced", points_per_decade=ppd))
    state = momentum_eigenstate(w, l0) if initial == "eigenstate" else gaussian_state(w, l0)
    t0 = time.time()
    tr = run_trajectory(cfg, state)
    wall = time.time() - t0
    status = "ok" if tr.ok else f"FAIL@{tr.failure['step']} ({tr.failure['kind']} {tr.failure.get('leakage'):.1e})"
    return tr, wall, status


def show(label, tr, wall, status, fit=None):
    line = f"{label:34s} {status:10s} wall={wall:6.1f}s drift={tr.norm_drift:.1e}"
    if fit and tr.ok:
        try:
            s, e = fit_growth(tr, *fit)
            line += f" slope[{fit[0]:g},{fit[1]:g}]={s:+.3f}+-{e:.3f}"
        except Exception as exc:
            line += f" fiterr:{exc}"
    if tr.ok and tr.ns.size:
        line += f" E_end={tr.energies[-1]:.3g}"
    print(line, flush=True)
    return tr


# --- criterion 6: regular rotor localization
tr, w_, st = run("constant", 1.0, 15.0, 15.0, 10_000, 4096)
show("C6 constant K=15 tau=1 R=4096", tr, w_, st, fit=(2000, 10_000))

# --- criterion 8: fibonacci tau=1 diffusive
tr, w_, st = run("fibonacci", 1.0, 10.0, 12.0, 10_000, 16384)
show("C8 fib tau=1 R=16384", tr, w_, st, fit=(100, 10_000))

# --- criterion 7: random tau=1 / tau=0.01; biperiodic taus
tr, w_, st = run("random", 1.0, 10.0, 12.0, 10_000, 16384, seed=20260810)
show("C7 random tau=1 R=16384", tr, w_, st, fit=(100, 10_000))
tr, w_, st = run("random", 0.01, 10.0, 12.0, 10_000, 2048, seed=20260810)
show("C7 random tau=0.01 R=2048", tr, w_, st, fit=(100, 10_000))
for tau in (0.01, 1.0, 5.0):
    tr, w_, st = run("biperiodic", tau, 10.0, 12.0, 10_000, 2048)
    if tr.ok:
        m1 = tr.energies[(tr.ns >= 1000) & (tr.ns <= 10_000)].max()
        m2 = tr.energies[(tr.ns >= 100) & (tr.ns <= 1000)].mean()
        print(f"C7 biperiodic tau={tau:4}: max[1e3,1e4]={m1:.4g} mean[1e2,1e3]={m2:.4g} ratio={m1/m2:.2f}", flush=True)
    else:
        show(f"C7 biperiodic tau={tau}", tr, w_, st)

# --- criterion 9: tau=0.01 plateau + Eq.8 estimate
tr, w_, st = run("fibonacci", 0.01, 10.0, 12.0, 100_000, 2048)
tr9 = show("C9 fib tau=0.01 R=2048 N=1e5", tr, w_, st, fit=(1000, 100_000))
if tr.ok:
    mask = (tr.ns >= 1000) & (tr.ns <= 100_000)
    mean9 = float(tr.energies[mask].mean())
    print(f"C9 window mean = {mean9:.4g}")
    t0 = time.time()
    wspec = BasisWindow(0, 1024)
    _, h = fr.fibonacci_propagator(10.0, 12.0, 0.01, wspec)
    sd = fr.diagonalize(h)
    plat = fr.plateau_estimate(sd, 0)
    print(f"C9 plateau_estimate(R=1024) = {plat:.4g} ratio={mean9/plat:.3f} (eigh wall {time.time()-t0:.0f}s)", flush=True)
    prof = fr.localization_profile(sd)
    frac = float(np.mean((prof.ipr >= 50/1024) & (prof.tail_rate < 0)))
    print(f"C12 (R=1024) IPR>=50/R & tail<0 fraction = {frac:.3f}; median IPR*R = {np.median(prof.ipr)*1024:.0f}", flush=True)

# --- criterion 10: tau=0.05 / 0.07 crossover
for tau, steps in ((0.05, 200_000), (0.07, 200_000)):
    tr, w_, st = run("fibonacci", tau, 10.0, 12.0, steps, 4096)
    show(f"C10 fib tau={tau} R=4096", tr, w_, st, fit=(1000, 10_000))
    if tr.ok:
        ref, _ = plateau_stats(tr, 1000, 10_000)
        cx = detect_crossover(tr, ref)
        print(f"C10 tau={tau}: plateau_ref={ref:.4g} crossover={cx} "
              f"(deloc estimate {fr.delocalization_time(tau)})", flush=True)

# --- criterion 14: l0 = 200 plateau
tr, w_, st = run("fibonacci", 0.01, 10.0, 12.0, 100_000, 2048, l0=200, initial="gaussian")
show("C14 fib tau=0.01 l0=200", tr, w_, st, fit=(1000, 100_000))
if tr.ok:
    mask = (tr.ns >= 1000) & (tr.ns <= 100_000)
    print(f"C14 l0=200 window mean = {float(tr.energies[mask].mean()):.5g}", flush=True)

print("PROBE DONE", flush=True)
