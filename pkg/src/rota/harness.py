"""Seeded Monte-Carlo sweeps of the matching construction.

Each ``(n, trial)`` pair owns a seed derived from the master seed, so the
emitted CSV is byte-identical for a given configuration no matter how many
worker processes run it or in which order trials finish.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import time
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field as dc_field
from pathlib import Path

from .decompose import Decomposition, bad_pairs, decompose, split, verify
from .field import FieldSpec
from .sample import BasisFamily, RngStream, TSpec, sample_family

SCHEMA = "v1"
COLUMNS = (
    "n",
    "trial",
    "seed",
    "success_first",
    "success_final",
    "retries_used",
    "min_deg_left",
    "min_deg_right",
    "density",
    "failure_deficiency",
    "ms",
)
Z95 = 1.959963984540054


@dataclass(frozen=True)
class ExperimentConfig:
    """A sweep over ``ns`` with ``trials`` families each.

    ``t`` is a T description as accepted by :meth:`TSpec.parse`; for graphic T
    the swept value is the number of vertices. ``diagnostics``: 0 records
    success only, 1 adds degree statistics, 2 also scans for bad pairs.
    """

    field: FieldSpec
    t: str
    ns: tuple[int, ...]
    trials: int
    seed: int = 0
    mode: str = "full"
    retries: int = 3
    diagnostics: int = 0
    L_max: int = 2
    K_max: int = 2
    timing: bool = False
    workers: int | None = None
    artifacts: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "ns", tuple(int(n) for n in self.ns))
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.mode not in ("full", "halves"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.retries < 0:
            raise ValueError("retries must be non-negative")
        if self.diagnostics not in (0, 1, 2):
            raise ValueError("diagnostics level must be 0, 1 or 2")
        low = 2 if self.mode == "halves" else 1
        for n in self.ns:
            if n < low:
                raise ValueError(f"{self.mode} mode needs n >= {low}, got {n}")
        for n in self.ns:
            TSpec.parse(self.t, self.field, n)

    def tspec(self, n: int) -> TSpec:
        return TSpec.parse(self.t, self.field, n)

    def trial_seed(self, n: int, trial: int) -> int:
        return RngStream(self.seed).derive_seed(n, trial)

    def to_json(self) -> dict:
        out = asdict(self)
        out["field"] = self.field.label()
        out["ns"] = list(self.ns)
        return out


@dataclass
class TrialRecord:
    n: int
    trial: int
    seed: int
    success_first: bool
    success_final: bool
    retries_used: int
    min_deg_left: int | None = None
    min_deg_right: int | None = None
    density: float | None = None
    failure_deficiency: int | None = None
    ms: float | None = None
    deficient_set_size: int | None = None
    bad_pairs: int | None = None
    bad_pairs_single: int | None = None
    error: str | None = None

    def csv_row(self) -> list[str]:
        def fmt(v):
            if v is None:
                return ""
            if isinstance(v, bool):
                return str(int(v))
            if isinstance(v, float):
                return f"{v:.6f}"
            return str(v)

        return [fmt(getattr(self, c)) for c in COLUMNS]


def _family(cfg: ExperimentConfig, n: int, seed: int) -> BasisFamily:
    return sample_family(cfg.tspec(n), RngStream(seed))


def run_trial(cfg: ExperimentConfig, n: int, trial: int) -> TrialRecord:
    """One family, one decomposition; faults become a failed record."""
    seed = cfg.trial_seed(n, trial)
    start = time.perf_counter()
    try:
        fam = _family(cfg, n, seed)
        res = decompose(fam, cfg.mode, retries=cfg.retries)
        rec = TrialRecord(
            n, trial, seed, res.first_attempt_success, res.success, res.retries_used
        )
        if cfg.diagnostics >= 1:
            first = res.attempts[0]
            rec.min_deg_left = min(first.degrees_left, default=0)
            rec.min_deg_right = min(first.degrees_right, default=0)
            rec.density = first.density
        if not res.success:
            last = res.attempts[-1]
            rec.failure_deficiency = last.deficiency
            rec.deficient_set_size = len(last.deficient_set)
        if cfg.diagnostics >= 2:
            sv = split(fam)
            k_max = min(cfg.K_max, fam.r - sv.n_prime)
            found = bad_pairs(sv, cfg.L_max, k_max)
            rec.bad_pairs = len(found)
            rec.bad_pairs_single = sum(len(b.H) == 1 for b in found)
        if cfg.artifacts and res.success:
            _write_artifact(Path(cfg.artifacts), n, trial, fam, res.decomposition)
    except Exception as exc:  # recorded, never fatal to the sweep
        rec = TrialRecord(n, trial, seed, False, False, 0)
        rec.error = "".join(traceback.format_exception_only(type(exc), exc)).strip()
    if cfg.timing:
        rec.ms = (time.perf_counter() - start) * 1000.0
    return rec


def _write_artifact(root: Path, n: int, trial: int, fam: BasisFamily, d: Decomposition):
    root.mkdir(parents=True, exist_ok=True)
    obj = {"family": fam.to_json(), "decomposition": d.to_json()}
    (root / f"n{n}_t{trial}.json").write_text(json.dumps(obj))


def audit_artifacts(root: str | Path) -> dict[str, list[str]]:
    """Re-verify every saved (family, decomposition) pair; maps file name to violations."""
    out = {}
    for path in sorted(Path(root).glob("*.json")):
        obj = json.loads(path.read_text())
        fam = BasisFamily.from_json(obj["family"])
        rep = verify(fam, Decomposition.from_json(obj["decomposition"]))
        out[path.name] = rep.violations
    return out


def _run_one(args):
    cfg, n, trial = args
    return run_trial(cfg, n, trial)


def worker_count(cfg: ExperimentConfig) -> int:
    env = os.environ.get("ROTA_WORKERS")
    if env:
        return max(1, int(env))
    if cfg.workers:
        return max(1, cfg.workers)
    return os.cpu_count() or 1


def run_experiment(cfg: ExperimentConfig) -> tuple[list[TrialRecord], dict]:
    """All trials of the sweep (sorted by ``(n, trial)``) and their summary."""
    jobs = [(cfg, n, t) for n in cfg.ns for t in range(cfg.trials)]
    workers = min(worker_count(cfg), len(jobs))
    if workers <= 1:
        records = [_run_one(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_run_one, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    records.sort(key=lambda r: (r.n, r.trial))
    return records, summarize(cfg, records)


# -------------------------------------------------------------- output


def wilson_interval(successes: int, total: int, z: float = Z95) -> tuple[float, float]:
    if total == 0:
        return 0.0, 1.0
    phat = successes / total
    denom = 1 + z * z / total
    centre = (phat + z * z / (2 * total)) / denom
    half = z * math.sqrt(phat * (1 - phat) / total + z * z / (4 * total * total)) / denom
    # the exact interval always contains phat; clamp away float rounding at 0 and 1
    return max(0.0, min(phat, centre - half)), min(1.0, max(phat, centre + half))


def summarize(cfg: ExperimentConfig, records: list[TrialRecord]) -> dict:
    per_n = []
    for n in cfg.ns:
        rs = [r for r in records if r.n == n]
        first = sum(r.success_first for r in rs)
        final = sum(r.success_final for r in rs)
        row = {
            "n": n,
            "trials": len(rs),
            "success_first": first / len(rs),
            "success_first_ci95": wilson_interval(first, len(rs)),
            "success_final": final / len(rs),
            "success_final_ci95": wilson_interval(final, len(rs)),
            "errors": sum(r.error is not None for r in rs),
        }
        dens = [r.density for r in rs if r.density is not None]
        if dens:
            row["density_mean"] = sum(dens) / len(dens)
            row["density_min"] = min(dens)
            row["min_degree_min"] = min(min(r.min_deg_left, r.min_deg_right) for r in rs if r.density is not None)
        if cfg.diagnostics >= 2:
            row["trials_with_bad_pairs"] = sum(bool(r.bad_pairs) for r in rs)
            row["bad_pairs_with_single_H"] = sum(r.bad_pairs_single or 0 for r in rs)
        per_n.append(row)
    return {"schema": SCHEMA, "config": cfg.to_json(), "results": per_n}


def to_csv(records: list[TrialRecord]) -> str:
    buf = io.StringIO()
    buf.write(f"# schema: {SCHEMA}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in records:
        w.writerow(r.csv_row())
    return buf.getvalue()


def write_outputs(records: list[TrialRecord], summary: dict, csv_path, summary_path=None):
    Path(csv_path).write_text(to_csv(records))
    if summary_path is not None:
        Path(summary_path).write_text(json.dumps(summary, indent=2) + "\n")


def read_csv(path) -> list[dict[str, str]]:
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0] != f"# schema: {SCHEMA}":
        raise ValueError(f"{path} is not a schema {SCHEMA} CSV")
    return list(csv.DictReader(lines[1:]))
