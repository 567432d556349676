"""Acceptance gate: one test per criterion, one PASS/FAIL line per criterion.

Run under pytest (the lines appear in the terminal summary) or directly with
``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import json
import random
import sys
import time
from collections import Counter
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from ancestral_compat import (  # noqa: E402
    CertificateKind,
    check_c1,
    cluster_compatibility,
    cluster_representation,
    common_restriction_pair,
    isomorphic,
    join,
    join_same_labels,
    local_compatibility,
    normalize_semilabeled,
    parse_one,
    restrict,
    serialize_newick,
    verify_embedding,
)
from ancestral_compat.cli import build_report, run_batch  # noqa: E402
from ancestral_compat.errors import DuplicateLabel, NewickSyntaxError  # noqa: E402

from oracles import all_semilabeled_up_to, exists_common_display, semilabeled_trees  # noqa: E402
from treegen import SHARED, pairs, random_atree, random_semilabeled  # noqa: E402

P = parse_one
K = CertificateKind
FIX = Path(__file__).parent / "fixtures"

RESULTS: dict = {}
_SAMPLE = {}

EQUIV_SEEDS = (101, 202, 303, 404, 505)
EQUIV_PER_SEED = 2000


def record(n, title):
    def deco(fn):
        def run():
            t0 = time.perf_counter()
            try:
                detail = fn()
            except BaseException as exc:
                RESULTS[n] = (False, title, f"{type(exc).__name__}: {exc}",
                              time.perf_counter() - t0)
                raise
            RESULTS[n] = (True, title, detail or "", time.perf_counter() - t0)

        run.__name__ = fn.__name__
        run.criterion = n
        return run

    return deco


def equivalence_sample():
    if "pairs" not in _SAMPLE:
        out = []
        for seed in EQUIV_SEEDS:
            out.extend(pairs(seed, EQUIV_PER_SEED))
        _SAMPLE["pairs"] = out
    return _SAMPLE["pairs"]


# criteria --------------------------------------------------------------------


@record(1, "small example trees give the expected verdicts")
def criterion_1():
    t0 = time.perf_counter()
    t1 = P("((A,B),C);")
    assert local_compatibility(t1, P("(A,B,C);")).compatible
    assert cluster_compatibility(t1, P("(A,B,C);")).compatible
    for other in ("((A,C),B);", "(A,(B,C));"):
        loc = local_compatibility(t1, P(other))
        clu = cluster_compatibility(t1, P(other))
        assert not loc.compatible and not clu.compatible
        assert any(
            c.kind is K.INCOMPATIBLE_TRIPLE and set(c.labels) == set("ABC")
            for c in loc.certificates
        )
        assert any(c.kind is K.PROPER_CLUSTER_INTERSECTION for c in clu.certificates)
    assert local_compatibility(P("(A,B)C;"), P("((A,B))C;")).compatible
    assert cluster_compatibility(P("(A,B)C;"), P("((A,B))C;")).compatible

    others = semilabeled_trees("ABC")
    checked = 0
    for text in ("((A)B,C);", "((A)B)C;"):
        t = P(text)
        assert local_compatibility(t, t).compatible and cluster_compatibility(t, t).compatible
        rel = {(c.labels) for c in check_c1(t, P("(A,B,C);"))}
        for u in others:
            if {c.labels for c in check_c1(u, P("(A,B,C);"))} != rel:
                assert not local_compatibility(t, u).compatible
                assert not cluster_compatibility(t, u).compatible
                checked += 1
    s, t = P("(A,B);"), P("((B)A);")
    assert [c.labels for c in check_c1(s, t)] == [("A", "B")]
    assert not cluster_compatibility(s, t).compatible
    elapsed = time.perf_counter() - t0
    assert elapsed < 1.0, f"took {elapsed:.2f}s"
    return f"{checked} differing structures rejected, {elapsed:.3f}s"


@record(2, "local and cluster methods agree on random pairs")
def criterion_2():
    t0 = time.perf_counter()
    sample = equivalence_sample()
    assert len(sample) >= 10000
    bad = 0
    verdicts = Counter()
    for t1, t2 in sample:
        shared = t1.label_set & t2.label_set
        assert len(shared) <= 10
        a = local_compatibility(t1, t2).compatible
        b = cluster_compatibility(t1, t2).compatible
        bad += a != b
        verdicts[b] += 1
    elapsed = time.perf_counter() - t0
    assert bad == 0, f"{bad} disagreements"
    assert elapsed < 60, f"took {elapsed:.1f}s"
    return (f"{len(sample)} pairs, {verdicts[True]} compatible, "
            f"{verdicts[False]} incompatible, 0 disagreements, {elapsed:.1f}s")


@record(3, "join embeddings verify on every compatible pair")
def criterion_3():
    t0 = time.perf_counter()
    n = 0
    for t1, t2 in equivalence_sample():
        if not cluster_compatibility(t1, t2).compatible:
            continue
        n += 1
        res = join(t1, t2)
        s = res.supertree
        assert verify_embedding(res.f1, t1, s) == []
        assert verify_embedding(res.f2, t2, s) == []
        uncovered = set(s.nodes) - set(res.f1.values()) - set(res.f2.values())
        assert uncovered == ({s.root} if res.fresh_root else set())
        pair = common_restriction_pair(t1, t2)
        if pair.common:
            core = join_same_labels(pair.bar1, pair.bar2)
            cl = core.supertree.clusters()
            for y, chain in core.core_chains.items():
                assert all(cl[w] == y for w in chain)
    elapsed = time.perf_counter() - t0
    assert elapsed < 120, f"took {elapsed:.1f}s"
    return f"{n} joins verified, {elapsed:.1f}s"


@record(4, "worked example join and restrictions")
def criterion_4():
    t1 = P("(((A,B)C,D),(E,F,G));")
    t2 = P("((A,B)H,E,(J,(K)G)I);")
    res = join(t1, t2)
    assert isomorphic(normalize_semilabeled(res.supertree),
                      P("((((A,B)H)C,D),(E,F,(J,(K)G)I));"))
    assert verify_embedding(res.f1, t1, res.supertree) == []
    assert verify_embedding(res.f2, t2, res.supertree) == []
    pair = common_restriction_pair(t1, t2)
    for bar, expected in ((pair.bar1, "(((A,B)),(E,G));"), (pair.bar2, "((A,B),E,(G));")):
        got, want = cluster_representation(bar), cluster_representation(P(expected))
        assert got.multiplicity == want.multiplicity
        assert isomorphic(bar, P(expected))
    return serialize_newick(res.supertree)


@record(5, "exhaustive common-supertree oracle on up to 3 labels")
def criterion_5():
    trees = all_semilabeled_up_to("ABC")
    cands = {}
    agree = total = 0
    for a in trees:
        for b in trees:
            key = a.label_set | b.label_set
            if key not in cands:
                cands[key] = semilabeled_trees(key)
            want = exists_common_display(a, b, cands[key])
            got = cluster_compatibility(a, b).compatible
            assert got == want, f"{serialize_newick(a)} vs {serialize_newick(b)}"
            assert local_compatibility(a, b).compatible == want
            agree += 1
            total += 1
    return f"{total} pairs over {len(trees)} trees, exact agreement"


@record(6, "restriction and normalization laws")
def criterion_6():
    rng = random.Random(606)
    pool = list(SHARED) + [f"x{i}" for i in range(6)]
    n = 1200
    for _ in range(n):
        t = random_atree(rng, rng.sample(pool, rng.randint(1, len(pool))))
        x = set(rng.sample(pool, rng.randint(0, len(pool))))
        y = set(rng.sample(pool, rng.randint(0, len(pool))))
        assert isomorphic(restrict(restrict(t, x), y), restrict(t, x & y))
        assert restrict(t, x).label_set == t.label_set & x
        nt = normalize_semilabeled(t)
        assert isomorphic(normalize_semilabeled(nt), nt)
        assert cluster_representation(nt).clusters == cluster_representation(t).clusters
    return f"{n} random trees"


@record(7, "Newick round trip and rejections")
def criterion_7():
    rng = random.Random(707)
    pool = list(SHARED) + [f"n{i}" for i in range(10)]
    n = 1200
    for _ in range(n):
        t = random_atree(rng, rng.sample(pool, rng.randint(1, len(pool))))
        assert isomorphic(parse_one(serialize_newick(t)), t)
    with pytest.raises(DuplicateLabel):
        parse_one("(A,A);")
    with pytest.raises(NewickSyntaxError, match="branch lengths"):
        parse_one("(A:1.0,B);")
    return f"{n} random trees"


@record(8, "cluster test on 2000-label trees under 5 s")
def criterion_8():
    rng = random.Random(808)
    labels = [f"L{i}" for i in range(2000)]
    times = []
    for _ in range(2):
        a = random_semilabeled(rng, labels)
        b = random_semilabeled(rng, labels)
        assert len(a.label_set) == len(b.label_set) == 2000
        t0 = time.perf_counter()
        v = cluster_compatibility(a, b)
        times.append(time.perf_counter() - t0)
        assert times[-1] < 5, f"took {times[-1]:.2f}s"
    # a compatible pair: the second tree refines the first
    big = random_semilabeled(rng, labels)
    t0 = time.perf_counter()
    assert cluster_compatibility(big, normalize_semilabeled(big)).compatible
    times.append(time.perf_counter() - t0)
    assert times[-1] < 5
    return ", ".join(f"{x:.2f}s" for x in times) + f" ({len(v.certificates)} certificates)"


@record(9, "batch report over the fixture corpus matches the golden output")
def criterion_9():
    from ancestral_compat.cli import _load_corpus

    import os

    here = os.getcwd()
    os.chdir(FIX / "corpus")
    try:
        trees, sources = _load_corpus(["."], False)
    finally:
        os.chdir(here)
    golden = (FIX / "expected_batch_corpus.json").read_text()
    local = json.dumps(build_report(sources, run_batch(trees, "local"), "local"), indent=2) + "\n"
    again = json.dumps(build_report(sources, run_batch(trees, "local"), "local"), indent=2) + "\n"
    assert local == golden == again
    clu = build_report(sources, run_batch(trees, "clusters"), "clusters")
    ref = json.loads(golden)
    assert [p["compatible"] for p in clu["pairs"]] == [p["compatible"] for p in ref["pairs"]]
    return f"{ref['n_trees']} trees, {ref['n_pairs']} pairs, {ref['n_incompatible']} incompatible"


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9]


@pytest.mark.parametrize("criterion", CRITERIA, ids=lambda c: f"criterion_{c.criterion}")
def test_acceptance(criterion):
    criterion()


def summary_lines():
    out = []
    for n in sorted(RESULTS):
        ok, title, detail, secs = RESULTS[n]
        out.append(f"criterion {n}: {'PASS' if ok else 'FAIL'} - {title} [{detail}]")
    return out


if __name__ == "__main__":
    for c in CRITERIA:
        try:
            c()
        except BaseException:
            pass
    print("\n".join(summary_lines()))
    sys.exit(0 if all(r[0] for r in RESULTS.values()) else 1)
