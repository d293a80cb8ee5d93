"""Command-line interface: ``specbip <command> ...``.

Exit status: 0 success, 1 usage error, 2 unreadable input file, 3 numerical
failure.  Node numbers in all text files are 1-based.  A permutation file
lists, for each new position, the node that moves there.
"""
from __future__ import annotations

import argparse
import io
import sys
from pathlib import Path

import numpy as np
import scipy.io
import scipy.sparse as sp

from . import __version__
from .bench import parse_manifest, run_bench, summarize, summary_csv, trials_csv
from .bipartizer import (MODES, BipartizeOptions, DisconnectedGraphError, bipartize,
                         detect_anticommunity, estimate_cardinalities)
from .graph import (FORMATS, Graph, NodePermutation, ParseError, Partition,
                    canonical_format, connected_components, extract_subgraph,
                    frustration, guess_format, is_connected, load_graph, strip,
                    write_graph)
from .linalg import eigvalsh
from .metrics import csv_header, quality_report
from .testgen import TestSpec, make_experiment

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# -- small file helpers -----------------------------------------------------

def _open_out(path):
    """Text sink for ``path``; ``None`` or ``-`` means stdout."""
    if path in (None, "-"):
        return _Stdout()
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    return open(p, "w", encoding="utf-8", newline="\n")


class _Stdout(io.StringIO):
    def close(self):
        sys.stdout.write(self.getvalue())
        super().close()


def _write(path, text):
    with _open_out(path) as fh:
        fh.write(text)


def _read_graph(path, fmt):
    try:
        return load_graph(path, fmt)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror or exc}") from None


def format_matrix_market(a) -> str:
    """Symmetric dense matrix as ``coordinate real symmetric`` (lower triangle)."""
    a = np.asarray(a, dtype=float)
    i, j = np.nonzero(np.tril(a))
    out = [f"%%MatrixMarket matrix coordinate real symmetric\n{a.shape[0]} {a.shape[1]} {i.size}\n"]
    out += [f"{r + 1} {c + 1} {v!r}\n" for r, c, v in zip(i.tolist(), j.tolist(), a[i, j].tolist())]
    return "".join(out)


def read_matrix(path, fmt=None) -> sp.csr_matrix:
    """Any graph file, or a general Matrix Market file (e.g. a signed A_B)."""
    fmt = canonical_format(fmt) if fmt else guess_format(path)
    if fmt == "mtx":
        try:
            m = scipy.io.mmread(path)
        except OSError as exc:
            raise ParseError(f"cannot read {path}: {exc.strerror or exc}") from None
        except (ValueError, IndexError) as exc:
            raise ParseError(f"{path}: {exc}") from None
        m = sp.csr_matrix(m, dtype=float)
        if m.shape[0] != m.shape[1]:
            raise ParseError(f"{path}: matrix is not square")
        return m
    return _read_graph(path, fmt).to_sparse()


def format_partition(labels, nodes=None) -> str:
    nodes = np.arange(len(labels)) if nodes is None else np.asarray(nodes)
    return "".join(f"{v + 1}\t{s}\n" for v, s in zip(nodes.tolist(), np.asarray(labels).tolist()))


def read_partition(path, n) -> Partition:
    lab = np.zeros(n, dtype=np.int64)
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror or exc}") from None
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        try:
            v, s = int(tok[0]), int(tok[1])
        except (ValueError, IndexError):
            raise ParseError(f"{path}: expected 'node set'", lineno) from None
        if not 1 <= v <= n or s not in (1, 2):
            raise ParseError(f"{path}: bad entry {line!r}", lineno)
        lab[v - 1] = s
    if np.any(lab == 0):
        raise ParseError(f"{path}: partition does not cover all {n} nodes")
    return Partition.from_labels(lab)


def read_permutation(path, n) -> NodePermutation:
    try:
        vals = np.loadtxt(path, dtype=np.int64, comments="#", ndmin=1)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror or exc}") from None
    except ValueError as exc:
        raise ParseError(f"{path}: {exc}") from None
    if vals.size != n:
        raise ParseError(f"{path}: {vals.size} entries for {n} nodes")
    try:
        return NodePermutation.from_order(vals - 1)
    except (ValueError, IndexError):
        raise ParseError(f"{path}: not a permutation of 1..{n}") from None


def _kv(d) -> str:
    return "".join(f"{k}={v}\n" for k, v in d.items())


def _g(x) -> str:
    return f"{float(x):.6e}"


# -- commands -------------------------------------------------------------------

def _seed_field(args):
    return float("nan") if args.seed is None else args.seed


def cmd_gen(args) -> int:
    if args.spec:
        try:
            spec = TestSpec.from_text(Path(args.spec).read_text(encoding="utf-8"))
        except OSError as exc:
            raise ParseError(f"cannot read {args.spec}: {exc.strerror or exc}") from None
    else:
        if args.n1 is None or args.n2 is None:
            raise UsageError("gen needs --n1 and --n2 (or --spec FILE)")
        n1, n2 = max(args.n1, args.n2), min(args.n1, args.n2)
        seed = 0 if args.seed is None else args.seed
        spec = TestSpec(n1, n2, args.xi, args.eta, seed, args.weighted)
    fmt = canonical_format(args.format or "mtx")
    ext = {"pajek": ".net", "mtx": ".mtx", "tsv": ".tsv"}[fmt]
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    exp = make_experiment(spec)
    write_graph(exp.truth, out / f"truth{ext}", fmt)
    write_graph(exp.perturbed, out / f"perturbed{ext}", fmt)
    write_graph(exp.scrambled, out / f"scrambled{ext}", fmt)
    write_graph(exp.truth_scrambled, out / f"truth_scrambled{ext}", fmt)
    _write(out / "permutation.txt", "".join(f"{v}\n" for v in (exp.permutation.order + 1).tolist()))
    _write(out / "truth_partition.txt", format_partition(exp.partition.labels))
    _write(out / "spec.txt", spec.to_text())
    return EXIT_OK


def _options(args, n1n2=None) -> BipartizeOptions:
    return BipartizeOptions(n1n2=n1n2, gap_ratio=args.gap_ratio, zero_tol=args.zero_tol,
                            mode=args.mode)


def _bipartize_one(g, nodes, args, outdir: Path, n1n2=None, tag="") -> str:
    run = detect_anticommunity if args.anticommunity else bipartize
    b = run(g, _options(args, n1n2))
    outdir.mkdir(parents=True, exist_ok=True)
    orig = np.arange(g.n) if nodes is None else np.asarray(nodes)
    _write(outdir / "permutation.txt", "".join(f"{v + 1}\n" for v in orig[b.sigma.order].tolist()))
    _write(outdir / "partition.txt", format_partition(b.partition.labels, orig))
    _write(outdir / "a_b.mtx", format_matrix_market(b.a_b))
    if args.dump_dense:
        buf = io.StringIO()
        np.savetxt(buf, b.a_b_signed, fmt="%.17g")
        _write(outdir / "a_b_signed.txt", buf.getvalue())
    if nodes is not None:
        _write(outdir / "nodes.txt", "".join(f"{v + 1}\n" for v in orig.tolist()))
    fr = frustration(g, b.partition)
    method = "specbip-n1" if n1n2 is not None else "specbip"
    rep = quality_report(b.a_b, frustration=fr)
    _write(outdir / "report.csv", csv_header() + "\n" + rep.csv_row(
        n1=b.n1, n2=b.n2, seed=_seed_field(args), method=method) + "\n")
    est = b.estimate
    diag = {
        "n": g.n, "n1": b.n1, "n2": b.n2, "mode": b.mode,
        "estimated_n1": est.n1, "estimated_n2": est.n2,
        "gap_found": str(est.gap_found).lower(), "gap_index": est.k,
        "gap_ratio": _g(est.ratios[est.k - 1]) if est.gap_found else "nan",
        "defect_u1": _g(b.procrustes_defect["u1"]), "defect_u2": _g(b.procrustes_defect["u2"]),
        "defect_v": _g(b.procrustes_defect["v"]), "block_residual": _g(b.block_residual),
        "frustration": _g(fr), "b_s": _g(rep.b_s), "I_B": _g(rep.i_b),
    }
    if args.anticommunity:
        diag["internal_edges"] = b.internal_edges
        diag["internal_weight"] = _g(b.internal_weight)
    for k, note in enumerate(b.notes, 1):
        diag[f"note{k}"] = note
    _write(outdir / "diagnostics.txt", _kv(diag))
    if args.anticommunity:
        return (f"{tag}anti-community of {b.n1} nodes (rest {b.n2}); "
                f"{b.internal_edges} internal edges, weight {b.internal_weight:g}")
    return f"{tag}bipartization n1={b.n1} n2={b.n2}; frustrated weight {fr:g}"


def cmd_bipartize(args) -> int:
    g = _read_graph(args.graph, args.format)
    n1n2 = None
    if args.n1 is not None or args.n2 is not None:
        if args.component == "all":
            raise UsageError("--n1/--n2 cannot be combined with --component=all")
        n1n2 = (args.n1, args.n2)
    out = Path(args.out or ".")
    if is_connected(g) and args.component != "all":
        comps = [None]
    elif args.component == "error":
        raise DisconnectedGraphError(
            "input graph is disconnected; rerun with --component=largest "
            "(or --component=all) to bipartize its connected components")
    elif args.component == "largest":
        comps = [connected_components(g).largest]
    else:
        comps = [c for c in connected_components(g) if c.size > args.min_component]
        if not comps:
            raise UsageError(f"no component has more than {args.min_component} nodes")
    lines = []
    for k, nodes in enumerate(comps, 1):
        h = g if nodes is None else extract_subgraph(g, nodes)
        sizes = None
        if n1n2 is not None:
            n1, n2 = n1n2
            n1 = h.n - n2 if n1 is None else n1
            n2 = h.n - n1 if n2 is None else n2
            if n1 + n2 != h.n:
                raise UsageError(f"--n1 + --n2 must equal the number of nodes ({h.n})")
            sizes = (n1, n2)
        outdir = out / f"component_{k:03d}" if args.component == "all" else out
        tag = f"component {k} ({h.n} nodes): " if args.component == "all" else ""
        lines.append(_bipartize_one(h, nodes, args, outdir, sizes, tag))
    if not args.quiet:
        print("\n".join(lines))
    return EXIT_OK


def cmd_bench(args) -> int:
    try:
        text = Path(args.manifest).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {args.manifest}: {exc.strerror or exc}") from None
    try:
        man = parse_manifest(text)
    except ValueError as exc:
        raise ParseError(f"{args.manifest}: {exc}") from None
    if args.workers is not None:
        man.workers = args.workers
    if args.timing:
        man.timing = True
    if args.trials is not None:
        man.trials = args.trials
    if args.seed is not None:
        man.seed = args.seed
    records = run_bench(man)
    rows = summarize(man, records)
    _write(args.out or man.output, summary_csv(rows))
    if args.per_trial:
        _write(args.per_trial, trials_csv(man, records))
    failed = sum(r["failed"] for r in rows)
    if failed:
        print(f"warning: {failed} method runs failed; see the per-trial output",
              file=sys.stderr)
    return EXIT_OK


def _select(g: Graph, which: str) -> Graph:
    if which == "largest" and not is_connected(g):
        return extract_subgraph(g, connected_components(g).largest)
    return g


def cmd_eigplot(args) -> int:
    g = _select(_read_graph(args.graph, args.format), args.component)
    lam = eigvalsh(g.to_dense())
    est = estimate_cardinalities(lam, BipartizeOptions(gap_ratio=args.gap_ratio,
                                                       zero_tol=args.zero_tol))
    mags = np.sort(np.abs(lam))
    lines = [f"# n={g.n} n_zero={est.k} n1={est.n1} n2={est.n2}\n", "index\tabs_eigenvalue\n"]
    lines += [f"{k}\t{v:.17g}\n" for k, v in enumerate(mags.tolist(), 1)]
    _write(args.out, "".join(lines))
    return EXIT_OK


def cmd_spy(args) -> int:
    m = read_matrix(args.matrix, args.format)
    n = m.shape[0]
    n1 = args.n1
    if args.partition:
        n1 = read_partition(args.partition, n).n1
    if args.permutation:
        order = read_permutation(args.permutation, n).order
        m = m[order][:, order]
    m = sp.csr_matrix(m)
    m.eliminate_zeros()
    coo = m.tocoo()
    idx = np.lexsort((coo.col, coo.row))
    rows, cols = coo.row[idx] + 1, coo.col[idx] + 1
    head = f"# n={n} n1={n1 if n1 is not None else 'nan'} nnz={rows.size}\n"
    body = "".join(f"{r}\t{c}\n" for r, c in zip(rows.tolist(), cols.tolist()))
    _write(args.out, head + "row\tcol\n" + body)
    return EXIT_OK


def cmd_components(args) -> int:
    g = _read_graph(args.graph, args.format)
    loops = g.self_loop_count
    removed = np.zeros(0, dtype=np.int64)
    ids = np.arange(g.n)
    if not args.no_strip:
        g, removed, loops = strip(g)
        ids = np.setdiff1d(ids, removed)
    comps = connected_components(g)
    head = {"nodes": g.n, "edges": g.m, "self_loops": loops, "isolated_removed": removed.size,
            "components": len(comps), "largest": comps.sizes[0] if len(comps) else 0}
    lines = ["# " + " ".join(f"{k}={v}" for k, v in head.items()) + "\n"]
    if args.members:
        lines.append("component\tnode\n")
        for k, c in enumerate(comps, 1):
            lines += [f"{k}\t{v + 1}\n" for v in ids[c].tolist()]
    else:
        lines.append("component\tsize\n")
        lines += [f"{k}\t{s}\n" for k, s in enumerate(comps.sizes, 1)]
    _write(args.out, "".join(lines))
    return EXIT_OK


def cmd_metrics(args) -> int:
    a = read_matrix(args.matrix, args.format).toarray()
    n = a.shape[0]
    truth_part = read_partition(args.truth_partition, n) if args.truth_partition else None
    got = read_partition(args.partition, n) if args.partition else None
    a_true = None
    if args.truth:
        a_true = read_matrix(args.truth, args.format).toarray()
        if a_true.shape != a.shape:
            raise UsageError("--truth has a different size than the matrix")
    fr = float("nan")
    if got is not None:
        ref = _read_graph(args.graph, args.format) if args.graph else Graph.from_dense(np.abs(a))
        fr = frustration(ref, got)
    rep = quality_report(a, a_true=a_true if truth_part is not None else None,
                         truth=truth_part, got=got, frustration=fr)
    _write(args.out, csv_header() + "\n" + rep.csv_row(
        n1=truth_part.n1 if truth_part else (got.n1 if got else float("nan")),
        n2=truth_part.n2 if truth_part else (got.n2 if got else float("nan")),
        seed=_seed_field(args),
        method=args.method) + "\n")
    return EXIT_OK


# -- parser -------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="random seed (gen, bench)")
    common.add_argument("--out", default=None,
                        help="output file, or directory for gen/bipartize (default: stdout or .)")
    common.add_argument("--format", choices=sorted(FORMATS + ("matrix-market", "edge-list")),
                        default=None, help="graph file format (default: from the extension)")

    p = _Parser(prog="specbip", description="Spectral bipartization of networks.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("gen", parents=[common], help="write a random test problem")
    s.add_argument("--spec", help="key=value file with n1, n2, xi, eta, seed, weighted")
    s.add_argument("--n1", type=int)
    s.add_argument("--n2", type=int)
    s.add_argument("--xi", type=float, default=1e-2)
    s.add_argument("--eta", type=float, default=0.0)
    s.add_argument("--weighted", action="store_true")
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("bipartize", parents=[common], help="bipartize a graph file")
    s.add_argument("graph")
    s.add_argument("--n1", type=int, help="size of the larger set (skips the estimate)")
    s.add_argument("--n2", type=int, help="size of the smaller set")
    s.add_argument("--mode", choices=MODES, default="binary")
    s.add_argument("--gap-ratio", type=float, default=100.0)
    s.add_argument("--zero-tol", type=float, default=1e-8)
    s.add_argument("--component", choices=("error", "largest", "all"), default="error",
                   help="what to do with a disconnected graph")
    s.add_argument("--min-component", type=int, default=10,
                   help="with --component=all, skip components of at most this size")
    s.add_argument("--anticommunity", action="store_true",
                   help="report the first set as an anti-community")
    s.add_argument("--dump-dense", action="store_true",
                   help="also write the unrounded matrix as dense text")
    s.add_argument("--quiet", action="store_true")
    s.set_defaults(func=cmd_bipartize)

    s = sub.add_parser("bench", parents=[common], help="run a benchmark manifest")
    s.add_argument("manifest")
    s.add_argument("--per-trial", help="also write one row per trial to this file")
    s.add_argument("--workers", type=int)
    s.add_argument("--trials", type=int)
    s.add_argument("--timing", action="store_true", help="record wall-clock times")
    s.set_defaults(func=cmd_bench)

    s = sub.add_parser("eigplot", parents=[common], help="sorted eigenvalue magnitudes")
    s.add_argument("graph")
    s.add_argument("--component", choices=("whole", "largest"), default="whole")
    s.add_argument("--gap-ratio", type=float, default=100.0)
    s.add_argument("--zero-tol", type=float, default=1e-8)
    s.set_defaults(func=cmd_eigplot)

    s = sub.add_parser("spy", parents=[common], help="nonzero positions of a matrix")
    s.add_argument("matrix")
    s.add_argument("--permutation", help="permutation file to apply first")
    s.add_argument("--n1", type=int, help="separator position to record")
    s.add_argument("--partition", help="partition file giving the separator")
    s.set_defaults(func=cmd_spy)

    s = sub.add_parser("components", parents=[common], help="connected components")
    s.add_argument("graph")
    s.add_argument("--no-strip", action="store_true",
                   help="keep isolated nodes (self-loops never count)")
    s.add_argument("--members", action="store_true", help="list nodes per component")
    s.set_defaults(func=cmd_components)

    s = sub.add_parser("metrics", parents=[common], help="quality indices of a matrix")
    s.add_argument("matrix")
    s.add_argument("--truth", help="ground-truth matrix in the same node order")
    s.add_argument("--truth-partition", help="ground-truth partition file")
    s.add_argument("--partition", help="partition file to evaluate")
    s.add_argument("--graph", help="graph on which to count frustrated edges")
    s.add_argument("--method", default="input")
    s.set_defaults(func=cmd_metrics)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"specbip {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"specbip {args.command}: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except np.linalg.LinAlgError as exc:
        print(f"specbip {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, OSError) as exc:
        print(f"specbip {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
