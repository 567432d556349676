"""Ancestral compatibility of two A-trees.

Two independent deciders live here:

* :func:`local_compatibility` checks every shared label pair for a differing
  ancestor relation and every shared label triple for opposite nesting of
  pairwise MRCAs. It is cubic in the number of shared labels and is meant as
  an oracle.
* :func:`cluster_compatibility` restricts both trees to their shared labels
  and compares their cluster representations (bitset encoded). This is the
  default method.

Both return a :class:`Verdict` whose certificates explain every conflict.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from itertools import combinations

from .errors import DomainMismatch
from .restriction import common_restriction_pair, normalize_semilabeled, restrict
from .tree import ATree, cluster_representation, mrca, node_path

METHODS = ("local", "clusters")


class CertificateKind(str, enum.Enum):
    INCOMPATIBLE_PAIR = "IncompatiblePair"
    INCOMPATIBLE_TRIPLE = "IncompatibleTriple"
    SMALLEST_CLUSTER_MISMATCH = "SmallestClusterMismatch"
    PROPER_CLUSTER_INTERSECTION = "ProperClusterIntersection"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class Certificate:
    """One piece of evidence that two trees are incompatible.

    ``labels`` are in role order:

    * IncompatiblePair ``(A, B)``: exactly one tree has a path from A's node
      to B's node; ``sides[tN]["path"]`` says which.
    * IncompatibleTriple ``(A, B, C)``: in ``t1`` the MRCA of B,C is a strict
      ancestor of the MRCA of A,B, and in ``t2`` the reverse holds.
    * SmallestClusterMismatch ``(A,)``: ``clusters`` holds the smallest
      cluster containing A in each restricted tree.
    * ProperClusterIntersection ``(A, B, C)``: witnesses with A only in the
      first cluster, B in both and C only in the second.

    For the cluster kinds ``sides[tN]["node"]`` is the node (of the original
    input tree) realizing the cluster.
    """

    kind: CertificateKind
    labels: tuple
    clusters: tuple = ()
    sides: dict = field(default_factory=dict, compare=False, hash=False)

    def to_dict(self, t1: ATree | None = None, t2: ATree | None = None) -> dict:
        trees = {"t1": t1, "t2": t2}
        sides = {}
        for key in ("t1", "t2"):
            info = dict(self.sides.get(key, {}))
            if "node" in info and trees[key] is not None:
                info["node"] = node_path(trees[key], info["node"])
            sides[key] = info
        return {
            "kind": self.kind.value,
            "labels": list(self.labels),
            "clusters": [sorted(c) for c in self.clusters],
            "sides": sides,
        }

    def describe(self) -> str:
        k = self.kind
        if k is CertificateKind.INCOMPATIBLE_PAIR:
            a, b = self.labels
            has = "t1" if self.sides["t1"]["path"] else "t2"
            return f"pair {a},{b}: only {has} has a path {a} -> {b}"
        if k is CertificateKind.INCOMPATIBLE_TRIPLE:
            a, b, c = self.labels
            return (
                f"triple {a},{b},{c}: mrca({b},{c}) above mrca({a},{b}) in t1, "
                f"reversed in t2"
            )
        x1, x2 = (_fmt(c) for c in self.clusters)
        if k is CertificateKind.SMALLEST_CLUSTER_MISMATCH:
            return f"label {self.labels[0]}: smallest cluster {x1} in t1, {x2} in t2"
        return f"cluster {x1} properly intersects cluster {x2}"


def _fmt(cluster) -> str:
    return "{" + ",".join(sorted(cluster)) + "}"


@dataclass(frozen=True)
class Verdict:
    certificates: list
    method: str

    @property
    def compatible(self) -> bool:
        return not self.certificates

    def to_dict(self, t1: ATree | None = None, t2: ATree | None = None) -> dict:
        return {
            "compatible": self.compatible,
            "method": self.method,
            "certificates": [c.to_dict(t1, t2) for c in self.certificates],
        }

    def to_json(self, t1=None, t2=None, indent=2) -> str:
        return json.dumps(self.to_dict(t1, t2), indent=indent) + "\n"

    def __bool__(self):
        return self.compatible


# local test ----------------------------------------------------------------


class _PairTable:
    """Pairwise MRCAs of the shared labels plus O(1) ancestor queries."""

    def __init__(self, tree: ATree, labels):
        self.tin = tree._tin
        self.tout = tree._tout
        self.node = {a: tree.node_of(a) for a in labels}
        self.m = {}
        for a, b in combinations(labels, 2):
            v = mrca(tree, (a, b))
            self.m[a, b] = self.m[b, a] = v

    def above(self, u, v) -> bool:
        """Non-trivial path u ~> v."""
        return u != v and self.tin[u] <= self.tin[v] and self.tout[v] <= self.tout[u]

    def path(self, u, v) -> bool:
        return self.tin[u] <= self.tin[v] and self.tout[v] <= self.tout[u]


def _shared(t1, t2):
    return sorted(t1.label_set & t2.label_set)


def check_c1(t1: ATree, t2: ATree) -> list:
    """Ordered shared label pairs whose ancestor relation differs."""
    labels = _shared(t1, t2)
    out = []
    for a in labels:
        va1, va2 = t1.node_of(a), t2.node_of(a)
        for b in labels:
            if a == b:
                continue
            p1 = t1.is_ancestor(va1, t1.node_of(b))
            p2 = t2.is_ancestor(va2, t2.node_of(b))
            if p1 != p2:
                out.append(
                    Certificate(
                        CertificateKind.INCOMPATIBLE_PAIR,
                        (a, b),
                        sides={"t1": {"path": p1}, "t2": {"path": p2}},
                    )
                )
    return out


def check_c2(t1: ATree, t2: ATree, _tables=None) -> list:
    """Shared label triples whose pairwise MRCAs nest in opposite ways.

    Every ordered role assignment is tried; one certificate is kept per
    3-subset (the lexicographically first witnessing assignment).
    """
    labels = _shared(t1, t2)
    if len(labels) < 3:
        return []
    p1, p2 = _tables or (_PairTable(t1, labels), _PairTable(t2, labels))
    m1, m2 = p1.m, p2.m
    seen = set()
    out = []
    for a in labels:
        for b in labels:
            if b == a:
                continue
            ab1 = m1[a, b]
            ab2 = m2[a, b]
            for c in labels:
                if c == a or c == b:
                    continue
                if p1.above(m1[b, c], ab1) and p2.above(ab2, m2[b, c]):
                    key = frozenset((a, b, c))
                    if key in seen:
                        continue
                    seen.add(key)
                    out.append(
                        Certificate(
                            CertificateKind.INCOMPATIBLE_TRIPLE,
                            (a, b, c),
                            sides={
                                "t1": {"upper": [b, c], "lower": [a, b]},
                                "t2": {"upper": [a, b], "lower": [b, c]},
                            },
                        )
                    )
    out.sort(key=lambda cert: sorted(cert.labels))
    return out


def local_compatibility(t1: ATree, t2: ATree) -> Verdict:
    """Brute-force pair/triple test (the oracle method)."""
    return Verdict(check_c1(t1, t2) + check_c2(t1, t2), "local")


# cluster test --------------------------------------------------------------


class _BitTree:
    """Clusters of a restricted tree encoded as integers over a label index."""

    def __init__(self, tree: ATree, index: dict):
        self.tree = tree
        self.parent = tree._parent
        bits = {}
        labels = tree._labels
        children = tree._children
        for v in reversed(tree._preorder):
            lab = labels.get(v)
            b = 0 if lab is None else 1 << index[lab]
            for c in children[v]:
                b |= bits[c]
            bits[v] = b
        self.bits = bits
        anchor = {}
        for v in reversed(tree._preorder):
            anchor.setdefault(bits[v], v)  # postorder: lowest node first
        self.anchor = anchor
        self.node = [None] * len(index)
        for lab, i in index.items():
            self.node[i] = tree._node_of[lab]


def _lowbit(x: int) -> int:
    return (x & -x).bit_length() - 1


def _popcount(x: int) -> int:
    return bin(x).count("1")


def cluster_compatibility(t1: ATree, t2: ATree) -> Verdict:
    """Compare the cluster representations of the two shared-label restrictions.

    Reports every label whose smallest enclosing cluster differs and every
    pair of clusters that overlap without nesting.
    """
    pair = common_restriction_pair(t1, t2)
    common = sorted(pair.common)
    if not common:
        return Verdict([], "clusters")
    index = {a: i for i, a in enumerate(common)}
    b1 = _BitTree(pair.bar1, index)
    b2 = _BitTree(pair.bar2, index)

    cache = {}

    def members(x):
        fs = cache.get(x)
        if fs is None:
            fs = cache[x] = frozenset(common[i] for i in _bits_to_indices(x))
        return fs

    certs = []
    for i, a in enumerate(common):
        v1, v2 = b1.node[i], b2.node[i]
        x1, x2 = b1.bits[v1], b2.bits[v2]
        if x1 != x2:
            certs.append(
                Certificate(
                    CertificateKind.SMALLEST_CLUSTER_MISMATCH,
                    (a,),
                    (members(x1), members(x2)),
                    {"t1": {"node": v1}, "t2": {"node": v2}},
                )
            )

    conflicts = _proper_intersections(b1, b2, index)
    if conflicts:
        rank1 = _ranks(b1.anchor)
        rank2 = _ranks(b2.anchor)
        conflicts.sort(key=lambda p: (rank1[p[0]], rank2[p[1]]))
        for x1, x2 in conflicts:
            wa = common[_lowbit(x1 & ~x2)]
            wb = common[_lowbit(x1 & x2)]
            wc = common[_lowbit(x2 & ~x1)]
            certs.append(
                Certificate(
                    CertificateKind.PROPER_CLUSTER_INTERSECTION,
                    (wa, wb, wc),
                    (members(x1), members(x2)),
                    {"t1": {"node": b1.anchor[x1]}, "t2": {"node": b2.anchor[x2]}},
                )
            )
    return Verdict(certs, "clusters")


def _bits_to_indices(x: int) -> list:
    out = []
    while x:
        low = x & -x
        out.append(low.bit_length() - 1)
        x ^= low
    return out


def _ranks(anchor: dict) -> dict:
    keyed = sorted(anchor, key=lambda x: (_popcount(x), _bits_to_indices(x)))
    return {x: r for r, x in enumerate(keyed)}


def _proper_intersections(b1: _BitTree, b2: _BitTree, index: dict) -> list:
    """All pairs (X1, X2) of clusters that overlap without nesting.

    For each X1 the only T2 nodes meeting X1 are ancestors of the T2 nodes
    labeled in X1. Those at or above the lowest T2 node containing X1 contain
    it, so only the nodes strictly below that point need a subset test.
    """
    out = []
    tree1 = b1.tree
    pre1 = tree1._preorder
    tin1, tout1 = tree1._tin, tree1._tout
    idx1 = [index.get(tree1._labels.get(w), -1) for w in pre1]
    bits2 = b2.bits
    parent2 = b2.parent
    node2 = b2.node
    for x1, v1 in b1.anchor.items():
        members = [i for i in idx1[tin1[v1]:tout1[v1]] if i >= 0]
        m = node2[members[0]]
        while bits2[m] & x1 != x1:
            m = parent2[m]
        visited = set()
        found = set()
        notx = ~x1
        for i in members:
            u = node2[i]
            while u != m and u not in visited:
                visited.add(u)
                x2 = bits2[u]
                if x2 & notx and x2 not in found:
                    found.add(x2)
                    out.append((x1, x2))
                u = parent2[u]
    return out


def compatibility(t1: ATree, t2: ATree, method: str = "clusters") -> Verdict:
    if method == "clusters":
        return cluster_compatibility(t1, t2)
    if method == "local":
        return local_compatibility(t1, t2)
    raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")


def is_compatible(t1: ATree, t2: ATree) -> bool:
    return cluster_compatibility(t1, t2).compatible


# embeddings and display ----------------------------------------------------


@dataclass(frozen=True)
class Violation:
    """A failed weak-embedding condition with the witnessing node(s)."""

    kind: str  # "injective" | "label" | "preserve" | "reflect"
    nodes: tuple
    detail: str = ""


def verify_embedding(f: dict, s: ATree, t: ATree) -> list:
    """Check that ``f`` is a weak topological embedding of ``s`` into ``t``.

    Returns an empty list when ``f`` is injective, label preserving, and
    preserves and reflects paths. Path preservation is checked arc by arc.
    """
    if set(f) != set(s.nodes):
        missing = [v for v in s.nodes if v not in f]
        extra = [v for v in f if v not in s]
        raise DomainMismatch(
            f"map must be total on the source tree (missing {missing[:5]!r}, extra {extra[:5]!r})"
        )
    bad = [v for v in f.values() if v not in t]
    if bad:
        raise DomainMismatch(f"images not in the target tree: {bad[:5]!r}")
    out = []
    inverse = {}
    for v in s.nodes:
        w = f[v]
        if w in inverse:
            out.append(Violation("injective", (inverse[w], v), f"both map to {w!r}"))
        else:
            inverse[w] = v
    for v, a in s.labeling.items():
        if a not in t.label_set:
            out.append(Violation("label", (v,), f"label {a!r} missing from target"))
        elif f[v] != t.node_of(a):
            out.append(Violation("label", (v,), f"label {a!r} not preserved"))
    for a, b in s.edges():
        if not t.is_ancestor(f[a], f[b]):
            out.append(Violation("preserve", (a, b), "arc not sent to a path"))
    tparent = t._parent
    for b in s.nodes:
        w = f[b]
        while w is not None:
            a = inverse.get(w)
            if a is not None and not s.is_ancestor(a, b):
                out.append(Violation("reflect", (a, b), "image path has no preimage path"))
            w = tparent.get(w)
    return out


def ancestrally_displays(t: ATree, s: ATree) -> bool:
    """Whether ``t`` ancestrally displays ``s``.

    Checks label inclusion, equality of the ancestor relation on the labels
    of ``s``, and that every cluster of ``s`` is a cluster of ``t`` restricted
    to the labels of ``s``.
    """
    labels = s.label_set
    if not labels <= t.label_set:
        return False
    for a in labels:
        va_s, va_t = s.node_of(a), t.node_of(a)
        for b in labels:
            if a != b and s.is_ancestor(va_s, s.node_of(b)) != t.is_ancestor(
                va_t, t.node_of(b)
            ):
                return False
    return cluster_representation(s).clusters <= cluster_representation(
        restrict(t, labels)
    ).clusters


def display_embedding(t: ATree, s: ATree):
    """Candidate embedding of the semi-labeled normalization of ``s`` into ``t``.

    Each node of ``s'`` goes to the MRCA in ``t`` of its cluster. When ``t``
    ancestrally displays ``s`` this map is a weak topological embedding.
    Returns ``(s_prime, mapping)``.
    """
    sp = normalize_semilabeled(s)
    cl = sp.clusters()
    return sp, {v: mrca(t, cl[v]) for v in sp.nodes}
