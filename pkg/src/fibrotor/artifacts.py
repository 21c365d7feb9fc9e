"""Reproducible on-disk artifacts: manifests, trace CSV, reports.

Every run directory holds

* ``manifest.json`` -- a deterministic ``core`` block (full config, code
  version, PRNG identity and seed, sequence checksum) plus a non-hashed
  ``timing`` block.  The manifest hash is the sha256 of the canonical JSON
  of the core block only, so data artifacts stay byte-identical across
  reruns even though wall time differs.
* ``trace.csv``     -- the energy samples; the first line pins the manifest
  hash, the loader refuses traces whose sibling manifest does not match.
* ``report.json``   -- analysis output, also stamped with the hash.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import IntegrityError, UsageError

MANIFEST_NAME = "manifest.json"
TRACE_NAME = "trace.csv"
REPORT_NAME = "report.json"
_HASH_PREFIX = "# manifest="


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def manifest_hash(core: dict) -> str:
    return hashlib.sha256(canonical_json(core).encode("utf-8")).hexdigest()


def atomic_write_text(path: Path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_manifest(run_dir: Path, core: dict, timing: dict | None = None) -> str:
    digest = manifest_hash(core)
    doc = {"core": core, "hash": digest, "timing": timing or {}}
    atomic_write_text(Path(run_dir) / MANIFEST_NAME, json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return digest


def read_manifest(run_dir: Path) -> dict:
    path = Path(run_dir) / MANIFEST_NAME
    if not path.exists():
        raise IntegrityError(f"missing manifest: {path}")
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if "core" not in doc or "hash" not in doc:
        raise IntegrityError(f"malformed manifest: {path}")
    if manifest_hash(doc["core"]) != doc["hash"]:
        raise IntegrityError(f"manifest hash mismatch in {path}")
    return doc


def trace_csv_text(ns: np.ndarray, energies: np.ndarray, fib_mask: np.ndarray,
                   digest: str) -> str:
    lines = [f"{_HASH_PREFIX}{digest}", "N,l2_mean,is_fibonacci_instant"]
    for n, e, f in zip(ns, energies, fib_mask):
        lines.append(f"{int(n)},{float(e)!r},{int(bool(f))}")
    return "\n".join(lines) + "\n"


def write_trace_csv(run_dir: Path, ns, energies, fib_mask, digest: str) -> Path:
    path = Path(run_dir) / TRACE_NAME
    atomic_write_text(path, trace_csv_text(np.asarray(ns), np.asarray(energies),
                                           np.asarray(fib_mask), digest))
    return path


@dataclass(frozen=True)
class LoadedTrace:
    """A trace read back from disk together with its verified manifest."""

    ns: np.ndarray
    energies: np.ndarray
    fib_mask: np.ndarray
    manifest: dict
    path: Path


def load_trace(trace_path: Path) -> LoadedTrace:
    """Read a trace CSV and verify it against the sibling manifest.

    Traces without a manifest, or whose embedded hash does not match the
    manifest core, are rejected.
    """
    trace_path = Path(trace_path)
    with open(trace_path, encoding="utf-8") as fh:
        first = fh.readline().strip()
        if not first.startswith(_HASH_PREFIX):
            raise IntegrityError(f"{trace_path} carries no manifest hash line")
        digest = first[len(_HASH_PREFIX):]
        header = fh.readline().strip()
        if header != "N,l2_mean,is_fibonacci_instant":
            raise IntegrityError(f"{trace_path} has unexpected header {header!r}")
        ns, energies, fibs = [], [], []
        for line in fh:
            line = line.strip()
            if not line:
                continue
            a, b, c = line.split(",")
            ns.append(int(a))
            energies.append(float(b))
            fibs.append(bool(int(c)))
    manifest = read_manifest(trace_path.parent)
    if manifest["hash"] != digest:
        raise IntegrityError(
            f"{trace_path} was produced under manifest {digest[:12]}..., "
            f"directory manifest is {manifest['hash'][:12]}...")
    return LoadedTrace(
        ns=np.array(ns, dtype=np.int64),
        energies=np.array(energies, dtype=np.float64),
        fib_mask=np.array(fibs, dtype=bool),
        manifest=manifest,
        path=trace_path,
    )


def write_report(run_dir: Path, report: dict) -> Path:
    path = Path(run_dir) / REPORT_NAME
    atomic_write_text(path, json.dumps(report, indent=2, sort_keys=True) + "\n")
    return path


def parse_config_file(path: Path) -> dict[str, str]:
    """Flat key=value configuration file; '#' starts a comment."""
    out: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
            key, value = line.split("=", 1)
            out[key.strip()] = value.strip()
    return out
