"""Command-line front end: presets, custom runs, deterministic artifacts.

Subcommands:

* ``evolve``    -- one trajectory from flags (or a key=value config file).
* ``preset``    -- named experiment presets; each parameter point gets its
                   own run directory with trace.csv / report.json / manifest.json.
* ``coeffs``    -- exact expansion-coefficient table as CSV.
* ``effective`` -- effective-Hamiltonian spectral report (JSON).
* ``analyze``   -- regime reports for previously written traces.

Output root resolution: ``-o/--out`` flag, else the FIBROTOR_OUTPUT_ROOT
environment variable, else ``./fibrotor-out``.
"""

from __future__ import annotations

import argparse
import csv as _csv
import io
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import __version__, analysis, artifacts, bchcoeff, effham
from .errors import FibrotorError, UsageError
from .evolve import EnergyTrace, EvolutionConfig, LogPolicy, run_trajectory
from .hilbert import BasisWindow, gaussian_state, momentum_eigenstate
from .kickseq import PRNG_NAME, KickSequenceSpec, SequenceKind

OUTPUT_ROOT_ENV = "FIBROTOR_OUTPUT_ROOT"


@dataclass(frozen=True)
class RunConfig:
    """One trajectory as launched from the CLI."""

    name: str
    kind: str
    tau: float
    k1: float
    k2: float
    steps: int
    basis: int
    center: int
    l0: int
    initial: str = "gaussian"      # gaussian | eigenstate
    log_policy: str = "log24"
    seed: int | None = None
    preset: str | None = None
    overrides: tuple[str, ...] = ()

    def as_dict(self) -> dict:
        d = {
            "name": self.name, "kind": self.kind, "tau": self.tau,
            "k1": self.k1, "k2": self.k2, "steps": self.steps,
            "basis": self.basis, "center": self.center, "l0": self.l0,
            "initial": self.initial, "log_policy": self.log_policy,
            "seed": self.seed, "preset": self.preset,
            "overrides": list(self.overrides),
        }
        return d


def _parse_log_policy(text: str) -> LogPolicy:
    if text == "every":
        return LogPolicy("every_step")
    if text == "fib":
        return LogPolicy("fibonacci_instants")
    if text.startswith("log"):
        ppd = text[3:] or "24"
        try:
            return LogPolicy("log_spaced", points_per_decade=int(ppd))
        except ValueError:
            pass
    raise UsageError(f"log policy must be 'every', 'fib' or 'log<N>', got {text!r}")


def _evolution_config(cfg: RunConfig) -> tuple[EvolutionConfig, "np.ndarray"]:
    spec = KickSequenceSpec(SequenceKind(cfg.kind), cfg.k1, cfg.k2, seed=cfg.seed)
    window = BasisWindow(cfg.center, cfg.basis)
    evo = EvolutionConfig(
        tau=cfg.tau, spec=spec, window=window, n_steps=cfg.steps,
        log_policy=_parse_log_policy(cfg.log_policy),
    )
    if cfg.initial == "gaussian":
        state = gaussian_state(window, cfg.l0)
    elif cfg.initial == "eigenstate":
        state = momentum_eigenstate(window, cfg.l0)
    else:
        raise UsageError(f"initial must be gaussian or eigenstate, got {cfg.initial!r}")
    return evo, state


def execute_run(cfg: RunConfig, run_dir: Path, quiet: bool = False) -> EnergyTrace:
    """Run one trajectory and write trace/report/manifest into ``run_dir``."""
    run_dir = Path(run_dir)
    run_dir.mkdir(parents=True, exist_ok=True)
    evo, state = _evolution_config(cfg)

    t0 = time.perf_counter()
    trace = run_trajectory(evo, state)
    wall = time.perf_counter() - t0

    core = {
        "package": "fibrotor",
        "version": __version__,
        "config": cfg.as_dict(),
        "prng": {"algorithm": PRNG_NAME, "seed": cfg.seed}
                if cfg.kind == "random" else None,
        "sequence_checksum": trace.sequence_checksum,
        "sampling_convention": "sample at N = state after N full steps (just before kick N+1)",
    }
    digest = artifacts.write_manifest(run_dir, core, timing={"wall_seconds": wall})
    artifacts.write_trace_csv(run_dir, trace.ns, trace.energies,
                              trace.fibonacci_mask(), digest)

    report: dict = {
        "manifest_hash": digest,
        "norm_drift": trace.norm_drift,
        "failure": trace.failure,
        "samples": int(trace.ns.size),
    }
    if trace.ok and trace.ns.size >= 10:
        try:
            report["regime"] = analysis.classify_trace(trace).as_dict()
        except FibrotorError as exc:
            report["regime_error"] = str(exc)
    artifacts.write_report(run_dir, report)

    if not quiet:
        status = "ok" if trace.ok else f"FAILED at step {trace.failure['step']}"
        print(f"[{cfg.name}] {status}  samples={trace.ns.size}  wall={wall:.1f}s")
    if not trace.ok and not quiet:
        print(f"[{cfg.name}] {trace.failure['message']}", file=sys.stderr)
    return trace


# --------------------------------------------------------------------------
# Presets: parameter points mapped to the reference experiments.
# Kick amplitudes are k1=10, k2=12 for every binary-sequence preset; the
# regular-rotor preset uses K=15.  Windows are sized so diffusive profiles
# keep ~13 sigma inside the guard zone.
# --------------------------------------------------------------------------

_FIG_TAUS_1A = (0.01, 0.05, 0.5, 1.0, 5.0)
_DIFFUSIVE_BASIS = 16384


def _fig1a_points() -> list[RunConfig]:
    basis = {0.01: 1024, 0.05: 2048, 0.5: _DIFFUSIVE_BASIS,
             1.0: _DIFFUSIVE_BASIS, 5.0: _DIFFUSIVE_BASIS}
    return [
        RunConfig(name=f"tau{tau:g}", kind="fibonacci", tau=tau, k1=10.0, k2=12.0,
                  steps=10_000, basis=basis[tau], center=0, l0=0,
                  initial="eigenstate", preset="fig1a")
        for tau in _FIG_TAUS_1A
    ]


def _fig1b_points() -> list[RunConfig]:
    return [
        RunConfig(name=f"tau{tau:g}", kind="fibonacci", tau=tau, k1=10.0, k2=12.0,
                  steps=200_000, basis=4096, center=0, l0=0,
                  initial="eigenstate", preset="fig1b")
        for tau in (0.03, 0.05, 0.07)
    ]


def _figA3_points() -> list[RunConfig]:
    return [
        RunConfig(name=f"tau{tau:g}", kind="constant", tau=tau, k1=15.0, k2=15.0,
                  steps=10_000, basis=4096, center=0, l0=0,
                  initial="eigenstate", preset="figA3")
        for tau in (0.01, 1.0, 5.0)
    ]


def _figB4_points() -> list[RunConfig]:
    points = []
    for tau in (0.01, 1.0, 5.0):
        points.append(RunConfig(
            name=f"biperiodic-tau{tau:g}", kind="biperiodic", tau=tau,
            k1=10.0, k2=12.0, steps=10_000, basis=2048, center=0, l0=0,
            initial="eigenstate", preset="figB4"))
    for tau, basis in ((0.01, 2048), (1.0, _DIFFUSIVE_BASIS), (5.0, _DIFFUSIVE_BASIS)):
        points.append(RunConfig(
            name=f"random-tau{tau:g}", kind="random", tau=tau,
            k1=10.0, k2=12.0, steps=10_000, basis=basis, center=0, l0=0,
            initial="eigenstate", seed=20260810, preset="figB4"))
    return points


def _figC5_points() -> list[RunConfig]:
    return [
        RunConfig(name=f"l0_{l0}", kind="fibonacci", tau=0.01, k1=10.0, k2=12.0,
                  steps=100_000, basis=2048, center=l0, l0=l0,
                  initial="gaussian", preset="figC5")
        for l0 in (0, 100, 200)
    ]


TRACE_PRESETS = {
    "fig1a": _fig1a_points,
    "fig1b": _fig1b_points,
    "figA3": _figA3_points,
    "figB4": _figB4_points,
    "figC5": _figC5_points,
}

SPECIAL_PRESETS = ("fig2a", "fig2b", "fig3")


def run_preset(name: str, out_root: Path, jobs: int = 1,
               overrides: dict | None = None, quiet: bool = False) -> int:
    overrides = overrides or {}
    out_dir = Path(out_root) / name
    out_dir.mkdir(parents=True, exist_ok=True)

    if name == "fig2a":
        n_max = int(overrides.get("steps", 10_000))
        with open(out_dir / "coefficients_stroboscopic.csv", "w", encoding="utf-8",
                  newline="") as fh:
            bchcoeff.write_coefficient_csv(fh, n_max, at="stroboscopic")
        if not quiet:
            print(f"[fig2a] wrote coefficients for n <= {n_max}")
        return 0
    if name == "fig2b":
        m_max = int(overrides.get("steps", 25))
        with open(out_dir / "coefficients_fibonacci.csv", "w", encoding="utf-8",
                  newline="") as fh:
            bchcoeff.write_coefficient_csv(fh, m_max, at="fibonacci")
        if not quiet:
            print(f"[fig2b] wrote coefficients at Fibonacci instants m <= {m_max}")
        return 0
    if name == "fig3":
        basis = int(overrides.get("basis", 1024))
        _emit_effective(out_dir, tau=0.01, k1=10.0, k2=12.0, basis=basis,
                        center=0, l0=0, eigenvector_samples=8, quiet=quiet)
        return 0

    if name not in TRACE_PRESETS:
        raise UsageError(
            f"unknown preset {name!r}; available: "
            f"{', '.join(sorted([*TRACE_PRESETS, *SPECIAL_PRESETS]))}")

    points = TRACE_PRESETS[name]()
    applied: list[str] = []
    for key in ("steps", "basis", "seed"):
        if key in overrides:
            points = [replace(p, **{key: int(overrides[key])}) for p in points]
            applied.append(f"{key}={overrides[key]}")
    if applied:
        points = [replace(p, overrides=tuple(applied)) for p in points]

    failures = 0
    reports: dict[str, analysis.RegimeReport] = {}

    def _one(cfg: RunConfig):
        trace = execute_run(cfg, out_dir / cfg.name, quiet=quiet)
        return cfg.name, trace

    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        for run_name, trace in pool.map(_one, points):
            if not trace.ok:
                failures += 1
            elif trace.ns.size >= 10:
                try:
                    reports[run_name] = analysis.classify_trace(trace)
                except FibrotorError:
                    pass

    if reports:
        rows = analysis.sweep_summary_rows(reports)
        buf = io.StringIO()
        _csv.writer(buf, lineterminator="\n").writerows(rows)
        artifacts.atomic_write_text(out_dir / "summary.csv", buf.getvalue())
    return 1 if failures else 0


def _emit_effective(out_dir: Path, tau: float, k1: float, k2: float, basis: int,
                    center: int, l0: int, eigenvector_samples: int = 0,
                    quiet: bool = False) -> None:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    window = BasisWindow(center, basis)
    u_fi, h_fi = effham.fibonacci_propagator(k1, k2, tau, window)
    sd = effham.diagonalize(h_fi)
    profile = effham.localization_profile(sd)
    plateau = effham.plateau_estimate(sd, l0)
    summary = effham.spectral_summary(
        sd, profile, plateau=plateau,
        config_echo={"tau": tau, "k1": k1, "k2": k2, "basis": basis,
                     "center": center, "l0": l0,
                     "eta_parity": "mean",
                     "unitary_residual": u_fi.tag_residual(interior_margin=0)},
    )
    effham.write_spectral_json(out_dir / "spectrum.json", summary)

    if eigenvector_samples > 0:
        # spread sample columns across the window by peak position
        order = np.argsort(profile.peak_l)
        picks = order[np.linspace(0, len(order) - 1, eigenvector_samples).astype(int)]
        lv = window.l_values()
        buf = io.StringIO()
        writer = _csv.writer(buf, lineterminator="\n")
        writer.writerow(["l"] + [f"prob_m{int(m)}" for m in picks])
        dens = np.abs(sd.vectors[:, picks]) ** 2
        for i, l in enumerate(lv):
            writer.writerow([int(l)] + [repr(float(x)) for x in dens[i]])
        artifacts.atomic_write_text(out_dir / "eigenvectors.csv", buf.getvalue())
    if not quiet:
        print(f"[effective] basis={basis} plateau_estimate={plateau:.6g} "
              f"-> {out_dir / 'spectrum.json'}")


# --------------------------------------------------------------------------
# argument parsing
# --------------------------------------------------------------------------

def _out_root(args) -> Path:
    if args.out:
        return Path(args.out)
    env = os.environ.get(OUTPUT_ROOT_ENV)
    return Path(env) if env else Path("fibrotor-out")


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key=value config file (flags override it)")
    p.add_argument("--kind", choices=[k.value for k in SequenceKind])
    p.add_argument("--tau", type=float)
    p.add_argument("--k1", type=float)
    p.add_argument("--k2", type=float)
    p.add_argument("--steps", type=int)
    p.add_argument("--basis", type=int, help="window size R (even)")
    p.add_argument("--center", type=int, help="window center (defaults to --l0)")
    p.add_argument("--l0", type=int)
    p.add_argument("--initial", choices=["gaussian", "eigenstate"])
    p.add_argument("--log-policy", dest="log_policy",
                   help="every | fib | log<N> (N points per decade, default log24)")
    p.add_argument("--seed", type=int)
    p.add_argument("--name", help="run directory name")


_RUN_DEFAULTS = {
    "kind": "fibonacci", "tau": 1.0, "k1": 10.0, "k2": 12.0, "steps": 1000,
    "basis": 2048, "l0": 0, "initial": "gaussian", "log_policy": "log24",
    "seed": None, "name": None, "center": None,
}

_CONFIG_PARSERS = {
    "kind": str, "tau": float, "k1": float, "k2": float, "steps": int,
    "basis": int, "l0": int, "initial": str, "log_policy": str,
    "seed": int, "name": str, "center": int,
}


def _resolve_run_config(args) -> RunConfig:
    merged = dict(_RUN_DEFAULTS)
    if args.config:
        file_conf = artifacts.parse_config_file(Path(args.config))
        for key, raw in file_conf.items():
            if key not in _CONFIG_PARSERS:
                raise UsageError(f"unknown config key {key!r} in {args.config}")
            merged[key] = _CONFIG_PARSERS[key](raw)
    for key in _CONFIG_PARSERS:
        val = getattr(args, key, None)
        if val is not None:
            merged[key] = val
    center = merged["center"] if merged["center"] is not None else merged["l0"]
    name = merged["name"] or (
        f"{merged['kind']}-tau{merged['tau']:g}-N{merged['steps']}")
    return RunConfig(
        name=name, kind=merged["kind"], tau=merged["tau"], k1=merged["k1"],
        k2=merged["k2"], steps=merged["steps"], basis=merged["basis"],
        center=center, l0=merged["l0"], initial=merged["initial"],
        log_policy=merged["log_policy"], seed=merged["seed"],
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fibrotor",
        description="Kicked-rotor dynamics under binary (Fibonacci) drives")
    parser.add_argument("--version", action="version", version=f"fibrotor {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_evolve = sub.add_parser("evolve", help="run one trajectory")
    _add_run_flags(p_evolve)
    p_evolve.add_argument("-o", "--out", help="output root directory")
    p_evolve.add_argument("-q", "--quiet", action="store_true")

    p_preset = sub.add_parser("preset", help="run a named experiment preset")
    p_preset.add_argument("name", help=", ".join(sorted([*TRACE_PRESETS, *SPECIAL_PRESETS])))
    p_preset.add_argument("-o", "--out", help="output root directory")
    p_preset.add_argument("--jobs", type=int, default=1)
    p_preset.add_argument("--steps", type=int, help="override preset step count")
    p_preset.add_argument("--basis", type=int, help="override preset window size")
    p_preset.add_argument("--seed", type=int, help="override preset seed")
    p_preset.add_argument("-q", "--quiet", action="store_true")

    p_coeffs = sub.add_parser("coeffs", help="exact expansion-coefficient CSV")
    p_coeffs.add_argument("--n-max", type=int, required=True,
                          help="last index (stroboscopic) or last Fibonacci index (fibonacci)")
    p_coeffs.add_argument("--at", choices=["stroboscopic", "fibonacci"],
                          default="stroboscopic")
    p_coeffs.add_argument("-o", "--out", help="output file (default stdout)")

    p_eff = sub.add_parser("effective", help="effective-Hamiltonian spectral report")
    p_eff.add_argument("--tau", type=float, default=0.01)
    p_eff.add_argument("--k1", type=float, default=10.0)
    p_eff.add_argument("--k2", type=float, default=12.0)
    p_eff.add_argument("--basis", type=int, default=1024)
    p_eff.add_argument("--center", type=int, default=0)
    p_eff.add_argument("--l0", type=int, default=0)
    p_eff.add_argument("--eigenvectors", type=int, default=0,
                       help="also dump this many sample eigenvector profiles")
    p_eff.add_argument("-o", "--out", help="output root directory")
    p_eff.add_argument("-q", "--quiet", action="store_true")

    p_an = sub.add_parser("analyze", help="regime reports for existing traces")
    p_an.add_argument("traces", nargs="+", help="paths to trace.csv files")
    p_an.add_argument("--summary", help="write a sweep summary CSV here")
    p_an.add_argument("-q", "--quiet", action="store_true")

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "evolve":
            cfg = _resolve_run_config(args)
            trace = execute_run(cfg, _out_root(args) / cfg.name, quiet=args.quiet)
            return 0 if trace.ok else 1

        if args.command == "preset":
            overrides = {k: v for k, v in (("steps", args.steps), ("basis", args.basis),
                                           ("seed", args.seed)) if v is not None}
            return run_preset(args.name, _out_root(args), jobs=args.jobs,
                              overrides=overrides, quiet=args.quiet)

        if args.command == "coeffs":
            if args.out:
                with open(args.out, "w", encoding="utf-8", newline="") as fh:
                    bchcoeff.write_coefficient_csv(fh, args.n_max, at=args.at)
            else:
                bchcoeff.write_coefficient_csv(sys.stdout, args.n_max, at=args.at)
            return 0

        if args.command == "effective":
            _emit_effective(_out_root(args) / "effective", tau=args.tau, k1=args.k1,
                            k2=args.k2, basis=args.basis, center=args.center,
                            l0=args.l0, eigenvector_samples=args.eigenvectors,
                            quiet=args.quiet)
            return 0

        if args.command == "analyze":
            reports: dict[str, analysis.RegimeReport] = {}
            for path in args.traces:
                loaded = artifacts.load_trace(Path(path))
                report = analysis.classify_trace(loaded)
                reports[str(Path(path).parent.name)] = report
                out = {"manifest_hash": loaded.manifest["hash"],
                       "regime": report.as_dict()}
                artifacts.atomic_write_text(
                    Path(path).parent / "analysis.json",
                    artifacts.canonical_json(out) + "\n")
                if not args.quiet:
                    print(f"{path}: {report.verdict} (slope {report.slope:.3f})")
            if args.summary:
                rows = analysis.sweep_summary_rows(reports)
                buf = io.StringIO()
                _csv.writer(buf, lineterminator="\n").writerows(rows)
                artifacts.atomic_write_text(Path(args.summary), buf.getvalue())
            return 0
    except FibrotorError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    parser.error("no command")
    return 2


if __name__ == "__main__":
    raise SystemExit(main())
