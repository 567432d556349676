"""Command-line front end.

Exit codes: 0 compatible / success, 1 incompatible, 2 usage or input error,
3 internal error (the two deciders disagree or an embedding fails to verify).
Verdicts go to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import datetime
import json
import os
import sys
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .compatibility import Verdict, cluster_compatibility, local_compatibility, verify_embedding
from .errors import IncompatibleTrees, NewickSyntaxError, TreeError
from .join import join
from .newick import canonicalize, parse_newick, parse_one, serialize_newick
from .tree import cluster_representation, node_path

EXIT_OK, EXIT_INCOMPATIBLE, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3
TREE_SUFFIXES = (".nwk", ".newick", ".tre", ".tree")


class InputError(Exception):
    pass


class Disagreement(Exception):
    pass


def _err(msg):
    print(f"error: {msg}", file=sys.stderr)


def _read_tree(path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from None
    try:
        return parse_one(text)
    except (NewickSyntaxError, TreeError) as exc:
        raise InputError(f"{path}: {exc}") from None


def _decide(t1, t2, method) -> Verdict:
    if method == "local":
        return local_compatibility(t1, t2)
    if method == "clusters":
        return cluster_compatibility(t1, t2)
    loc = local_compatibility(t1, t2)
    clu = cluster_compatibility(t1, t2)
    if loc.compatible != clu.compatible:
        raise Disagreement(
            f"local says {_word(loc.compatible)}, clusters says {_word(clu.compatible)}"
        )
    return Verdict(loc.certificates + clu.certificates, "both")


def _word(ok):
    return "compatible" if ok else "incompatible"


def _write(path, text):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


# check ---------------------------------------------------------------------


def cmd_check(args) -> int:
    t1 = _read_tree(args.t1)
    t2 = _read_tree(args.t2)
    verdict = _decide(t1, t2, args.method)
    print(_word(verdict.compatible))
    for cert in verdict.certificates:
        print(f"  {cert.kind.value}: {cert.describe()}")
    if args.certificate:
        _write(args.certificate, verdict.to_json(t1, t2))
    return EXIT_OK if verdict.compatible else EXIT_INCOMPATIBLE


# join ----------------------------------------------------------------------


def _path_map(f, src, dst):
    return {node_path(src, v): node_path(dst, w) for v, w in f.items()}


def cmd_join(args) -> int:
    t1 = _read_tree(args.t1)
    t2 = _read_tree(args.t2)
    try:
        res = join(t1, t2)
    except IncompatibleTrees as exc:
        print("incompatible")
        for cert in exc.certificates:
            print(f"  {cert.kind.value}: {cert.describe()}")
        return EXIT_INCOMPATIBLE
    bad = verify_embedding(res.f1, t1, res.supertree) + verify_embedding(
        res.f2, t2, res.supertree
    )
    if bad:
        _err(f"join produced an invalid embedding: {bad[0]}")
        return EXIT_INTERNAL
    sup = canonicalize(res.supertree)
    newick = serialize_newick(sup)
    emb_path = args.embeddings or str(Path(args.out).with_suffix(".embeddings.json"))
    doc = {
        "supertree": newick,
        "fresh_root": res.fresh_root,
        "f1": _path_map(res.f1, t1, sup),
        "f2": _path_map(res.f2, t2, sup),
    }
    _write(args.out, newick + "\n")
    _write(emb_path, json.dumps(doc, indent=2) + "\n")
    print(newick)
    return EXIT_OK


# clusters ------------------------------------------------------------------


def cmd_clusters(args) -> int:
    tree = _read_tree(args.tree)
    if tree.is_empty():
        return EXIT_OK
    rep = cluster_representation(tree)
    for y in rep.sorted_clusters():
        print("{" + ",".join(sorted(y)) + "}\t" + str(rep.multiplicity[y]))
    return EXIT_OK


# batch ---------------------------------------------------------------------


def _expand(paths):
    out = []
    for p in paths:
        p = Path(p)
        if p.is_dir():
            out.extend(sorted(q for q in p.iterdir() if q.suffix in TREE_SUFFIXES))
        else:
            out.append(p)
    return out


def _load_corpus(paths, skip_bad):
    trees, sources = [], []
    for path in _expand(paths):
        try:
            found = parse_newick(path.read_text(encoding="utf-8"))
        except (OSError, NewickSyntaxError, TreeError) as exc:
            msg = f"{path}: {getattr(exc, 'strerror', None) or exc}"
            if not skip_bad:
                raise InputError(msg) from None
            print(f"warning: skipping {msg}", file=sys.stderr)
            continue
        for k, t in enumerate(found):
            trees.append(t)
            sources.append(str(path) if len(found) == 1 else f"{path}#{k}")
    return trees, sources


def _check_pair(job):
    i, j, t1, t2, method = job
    v = _decide(t1, t2, method)
    kinds = Counter(c.kind.value for c in v.certificates)
    return {
        "i": i,
        "j": j,
        "compatible": v.compatible,
        "certificates": len(v.certificates),
        "kinds": dict(sorted(kinds.items())),
    }


def run_batch(trees, method="clusters", jobs=1):
    """Verdict rows for every unordered pair, ordered by ``(i, j)``."""
    todo = [
        (i, j, trees[i], trees[j], method)
        for i in range(len(trees))
        for j in range(i + 1, len(trees))
    ]
    if jobs > 1 and len(todo) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_check_pair, todo, chunksize=max(1, len(todo) // (jobs * 8))))
    return [_check_pair(job) for job in todo]


def build_report(sources, rows, method, timestamp=None) -> dict:
    n = len(sources)
    bad = sum(not r["compatible"] for r in rows)
    report = {}
    if timestamp is not None:
        report["generated"] = timestamp
    report.update(
        {
            "method": method,
            "n_trees": n,
            "n_pairs": len(rows),
            "n_incompatible": bad,
            "ratio": bad / len(rows) if rows else 0.0,
            "trees": [{"index": k, "source": s} for k, s in enumerate(sources)],
            "pairs": rows,
        }
    )
    return report


def cmd_batch(args) -> int:
    trees, sources = _load_corpus(args.paths, args.skip_bad)
    if len(trees) < 2:
        raise InputError(f"batch needs at least 2 trees, found {len(trees)}")
    jobs = args.jobs or os.cpu_count() or 1
    rows = run_batch(trees, args.method, jobs)
    stamp = None
    if not args.no_timestamp:
        stamp = datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")
    report = build_report(sources, rows, args.method, stamp)
    if args.report:
        _write(args.report, json.dumps(report, indent=2) + "\n")
    print(
        f"trees: {report['n_trees']}  pairs: {report['n_pairs']}  "
        f"incompatible: {report['n_incompatible']}  "
        f"ratio: {100 * report['ratio']:.3f}%"
    )
    return EXIT_OK


# entry point ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="ancestral-compat",
        description="Ancestral compatibility of semi-labeled trees in Newick format.",
    )
    sub = ap.add_subparsers(dest="command", required=True)
    methods = ("local", "clusters", "both")

    p = sub.add_parser("check", help="decide compatibility of two trees")
    p.add_argument("t1")
    p.add_argument("t2")
    p.add_argument("--method", choices=methods, default="clusters")
    p.add_argument("--certificate", metavar="PATH", help="write the verdict as JSON")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("join", help="build the join supertree of two compatible trees")
    p.add_argument("t1")
    p.add_argument("t2")
    p.add_argument("--out", required=True, metavar="PATH", help="Newick output")
    p.add_argument(
        "--embeddings",
        metavar="PATH",
        help="embedding JSON (default: OUT with suffix .embeddings.json)",
    )
    p.set_defaults(func=cmd_join)

    p = sub.add_parser("clusters", help="list clusters with multiplicities")
    p.add_argument("tree")
    p.set_defaults(func=cmd_clusters)

    p = sub.add_parser("batch", help="check all pairs of a tree corpus")
    p.add_argument("paths", nargs="+", help="tree files or directories of *.nwk files")
    p.add_argument("--method", choices=methods, default="clusters")
    p.add_argument("--report", metavar="PATH", help="write the JSON report here")
    p.add_argument("--skip-bad", action="store_true", help="warn on unreadable files")
    p.add_argument("--jobs", type=int, default=None, help="worker processes")
    p.add_argument("--no-timestamp", action="store_true")
    p.set_defaults(func=cmd_batch)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        _err(str(exc))
        return EXIT_USAGE
    except Disagreement as exc:
        _err(f"internal disagreement between methods: {exc}")
        return EXIT_INTERNAL
