"""Benchmark harness: random trials over a grid of test problems.

A manifest is a text file of ``key=value`` blocks separated by blank lines.
A block with an ``n1n2`` key describes grid cells; any other block holds the
global settings (at most one such block).  Example::

    trials=10
    methods=specbip,specbip-n1,redblack
    seed=0

    n1n2=256x128,512x256
    xi=1e-2
    eta=1e-4,1e-5

Grid values may be comma-separated lists; each block expands to the
product ``n1n2 x xi x eta`` in that nesting order.

Trial ``t`` of cell ``c`` uses the test-problem seed drawn from
``SeedSequence([seed, c, t])``, so every trial is reproducible on its own and
results do not depend on the number of workers.
"""
from __future__ import annotations

import itertools
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .bipartizer import BipartizeOptions, bipartize
from .graph import connected_components, extract_subgraph, frustration, is_connected
from .linalg import eigh
from .metrics import CSV_COLUMNS, csv_header, format_value, quality_report
from .redblack import red_black_order
from .testgen import TestSpec, make_experiment, parse_bool, parse_key_values

METHODS = ("specbip", "specbip-n1", "redblack")
TRIAL_COLUMNS = CSV_COLUMNS[:5] + ("trial", "method", "n", "est_n1", "est_n2") + CSV_COLUMNS[6:] + ("error",)
_GLOBAL_KEYS = {"trials", "methods", "seed", "output", "timing", "workers"}
_GRID_KEYS = {"n1n2", "xi", "eta", "weighted"}


@dataclass(frozen=True)
class Cell:
    n1: int
    n2: int
    xi: float
    eta: float
    weighted: bool = False

    def spec(self, seed: int) -> TestSpec:
        return TestSpec(self.n1, self.n2, self.xi, self.eta, seed, self.weighted)


@dataclass
class BenchManifest:
    """Grid cells plus run settings.  ``timing`` is off by default so that
    repeated runs give byte-identical output; ``time_s`` is then ``nan``."""

    cells: list[Cell]
    trials: int = 10
    methods: tuple[str, ...] = METHODS
    seed: int = 0
    output: str | None = None
    timing: bool = False
    workers: int = 1

    def __post_init__(self):
        self.methods = tuple(self.methods)
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not self.methods:
            raise ValueError("at least one method is required")
        bad = set(self.methods) - set(METHODS)
        if bad:
            raise ValueError(f"unknown methods {sorted(bad)}; choose from {METHODS}")
        if not self.cells:
            raise ValueError("manifest has no grid cells")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")

    def trial_seed(self, cell: int, trial: int) -> int:
        ss = np.random.SeedSequence([self.seed, cell, trial])
        return int(ss.generate_state(1, np.uint64)[0])


def _parse_pair(tok: str) -> tuple[int, int]:
    a, sep, b = tok.lower().partition("x")
    if not sep:
        raise ValueError(f"expected N1xN2, got {tok!r}")
    return int(a), int(b)


def _list(v: str) -> list[str]:
    return [t.strip() for t in v.split(",") if t.strip()]


def parse_manifest(text: str) -> BenchManifest:
    blocks = [b for b in _blocks(text) if b.strip()]
    settings: dict = {}
    cells: list[Cell] = []
    seen_global = False
    for block in blocks:
        kv = parse_key_values(block)
        if not kv:
            continue
        if "n1n2" in kv:
            unknown = set(kv) - _GRID_KEYS
            if unknown:
                raise ValueError(f"unknown grid keys: {sorted(unknown)}")
            weighted = parse_bool(kv.get("weighted", "false"))
            for (n1, n2), xi, eta in itertools.product(
                    [_parse_pair(t) for t in _list(kv["n1n2"])],
                    [float(t) for t in _list(kv.get("xi", "1e-2"))],
                    [float(t) for t in _list(kv.get("eta", "0"))]):
                cells.append(Cell(n1, n2, xi, eta, weighted))
        else:
            if seen_global:
                raise ValueError("more than one global block")
            unknown = set(kv) - _GLOBAL_KEYS
            if unknown:
                raise ValueError(f"unknown keys: {sorted(unknown)}")
            seen_global = True
            conv = {"trials": int, "seed": int, "workers": int, "output": str,
                    "timing": parse_bool, "methods": lambda v: tuple(_list(v))}
            settings = {k: conv[k](v) for k, v in kv.items()}
    for c in cells:
        TestSpec(c.n1, c.n2, c.xi, c.eta)  # validate ranges early
    return BenchManifest(cells, **settings)


def _blocks(text: str) -> list[str]:
    out, cur = [], []
    for line in text.splitlines():
        if line.strip():
            cur.append(line)
        elif cur:
            out.append("\n".join(cur))
            cur = []
    if cur:
        out.append("\n".join(cur))
    return out


@dataclass
class TrialRecord:
    cell: int
    trial: int
    seed: int
    method: str
    n: int
    est_n1: int
    est_n2: int
    values: dict = field(default_factory=dict)   # I_B, E_B, E_A, E_N, frustration
    time_s: float = float("nan")
    error: str = ""


_NAN_VALUES = dict.fromkeys(("I_B", "E_B", "E_A", "E_N", "frustration"), float("nan"))


def run_trial(cell: Cell, cell_index: int, trial: int, seed: int,
              methods=METHODS, timing: bool = False) -> list[TrialRecord]:
    """Run every method on one random problem (largest component only)."""
    exp = make_experiment(cell.spec(seed))
    g, truth_g, part = exp.scrambled, exp.truth_scrambled, exp.partition
    if not is_connected(g):
        nodes = connected_components(g).largest
        g, truth_g = extract_subgraph(g, nodes), extract_subgraph(truth_g, nodes)
        part = part.restrict(nodes)
    records = []
    fact = None
    eig_time = 0.0
    for method in methods:
        rec = TrialRecord(cell_index, trial, seed, method, g.n, -1, -1, dict(_NAN_VALUES))
        try:
            t0 = time.perf_counter()
            if method == "redblack":
                got = red_black_order(g).partition
                a_b = g.to_dense()
                elapsed = time.perf_counter() - t0
                with_cross = False
            else:
                if fact is None:
                    fact = eigh(g.to_dense())
                    eig_time = time.perf_counter() - t0
                    t0 = time.perf_counter()
                opts = BipartizeOptions(n1n2=(part.n1, part.n2) if method == "specbip-n1" else None)
                b = bipartize(g, opts, factorization=fact)
                got, a_b = b.partition, b.a_b
                rec.est_n1, rec.est_n2 = b.n1, b.n2
                elapsed = time.perf_counter() - t0 + eig_time
                with_cross = True
            rep = quality_report(a_b, a_true=truth_g, truth=part, got=got,
                                 frustration=frustration(g, got), with_cross=with_cross)
            rec.values = dict(I_B=rep.i_b, E_B=rep.e_b, E_A=rep.e_a, E_N=rep.e_n,
                              frustration=rep.frustration)
            if method == "redblack":
                rec.est_n1, rec.est_n2 = got.n1, got.n2
            if timing:
                rec.time_s = elapsed
        except Exception as exc:  # recorded, the bench goes on
            rec.error = f"{type(exc).__name__}: {exc}"
        records.append(rec)
    return records


def _run_job(args):
    return run_trial(*args)


def run_bench(manifest: BenchManifest) -> list[TrialRecord]:
    """All trial records, ordered by (cell, method, trial)."""
    jobs = [(cell, ci, t, manifest.trial_seed(ci, t), manifest.methods, manifest.timing)
            for ci, cell in enumerate(manifest.cells) for t in range(manifest.trials)]
    if manifest.workers > 1:
        with ProcessPoolExecutor(manifest.workers) as pool:
            results = list(pool.map(_run_job, jobs))
    else:
        results = [_run_job(j) for j in jobs]
    recs = [r for batch in results for r in batch]
    rank = {m: k for k, m in enumerate(manifest.methods)}
    recs.sort(key=lambda r: (r.cell, rank[r.method], r.trial))
    return recs


def _mean(xs) -> float:
    xs = np.asarray(xs, dtype=float)
    return float(xs.mean()) if xs.size else float("nan")


def summarize(manifest: BenchManifest, records: list[TrialRecord]) -> list[dict]:
    """Per (cell, method) means over the trials that did not fail."""
    rows = []
    for ci, cell in enumerate(manifest.cells):
        for method in manifest.methods:
            ok = [r for r in records if r.cell == ci and r.method == method and not r.error]
            row = dict(n1=cell.n1, n2=cell.n2, xi=cell.xi, eta=cell.eta,
                       seed=manifest.seed, method=method)
            for key in _NAN_VALUES:
                row[key] = _mean([r.values[key] for r in ok])
            row["time_s"] = _mean([r.time_s for r in ok])
            row["failed"] = sum(1 for r in records
                                if r.cell == ci and r.method == method and r.error)
            rows.append(row)
    return rows


def summary_csv(rows: list[dict]) -> str:
    lines = [csv_header()]
    lines += [",".join(format_value(r[k]) for k in CSV_COLUMNS) for r in rows]
    return "\n".join(lines) + "\n"


def trials_csv(manifest: BenchManifest, records: list[TrialRecord]) -> str:
    lines = [",".join(TRIAL_COLUMNS)]
    for r in records:
        cell = manifest.cells[r.cell]
        rec = dict(n1=cell.n1, n2=cell.n2, xi=cell.xi, eta=cell.eta, seed=r.seed,
                   trial=r.trial, method=r.method, n=r.n, est_n1=r.est_n1,
                   est_n2=r.est_n2, time_s=r.time_s, error=r.error.replace(",", ";").replace("\n", " "),
                   **r.values)
        lines.append(",".join(format_value(rec[k]) for k in TRIAL_COLUMNS))
    return "\n".join(lines) + "\n"
