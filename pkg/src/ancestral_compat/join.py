"""Join supertree of two compatible A-trees, with embeddings of both inputs.

The core step works on trees with equal label sets: every cluster of either
tree becomes a chain of nodes whose length is the larger of its two
multiplicities, and chains hang below the chain of their smallest proper
supercluster. General inputs are first restricted to their shared labels,
joined, and then the discarded parts of each input are grafted back on.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .compatibility import cluster_compatibility
from .errors import IncompatibleTrees, LabelSetMismatch
from .restriction import common_restriction_pair
from .tree import ATree, cluster_representation, cluster_sort_key, fresh_ids


@dataclass(frozen=True)
class JoinResult:
    """Supertree plus embeddings ``f1: t1 -> supertree`` and ``f2: t2 -> supertree``.

    ``core_chains`` maps each shared-label cluster to its chain of supertree
    nodes, lowest first. ``fresh_root`` is set when the inputs share no label
    and were hung below a new unlabeled root.
    """

    supertree: ATree
    f1: dict
    f2: dict
    core_chains: dict = field(default_factory=dict)
    fresh_root: bool = False


class _Builder:
    """Mutable parent/children/labels store used while assembling a join."""

    def __init__(self):
        self.children = {}
        self.parent = {}
        self.labels = {}
        self.next_id = 0
        self.root = None

    def new(self):
        v = self.next_id
        self.next_id += 1
        self.children[v] = []
        return v

    def attach(self, p, c):
        self.children[p].append(c)
        self.parent[c] = p

    def insert_above(self, w):
        """Put a new unlabeled node on the arc entering ``w`` (or above the root)."""
        nw = self.new()
        p = self.parent.get(w)
        if p is None:
            self.root = nw
        else:
            kids = self.children[p]
            kids[kids.index(w)] = nw
            self.parent[nw] = p
        self.attach(nw, w)
        return nw

    def freeze(self) -> ATree:
        return ATree(self.root, self.children, self.labels)


def _require_compatible(t1, t2):
    verdict = cluster_compatibility(t1, t2)
    if not verdict.compatible:
        raise IncompatibleTrees(verdict.certificates)


def join_same_labels(t1: ATree, t2: ATree) -> JoinResult:
    """Join two compatible trees over the same nonempty label set."""
    if t1.label_set != t2.label_set:
        raise LabelSetMismatch(
            "label sets differ: "
            f"{sorted(t1.label_set ^ t2.label_set)[:10]!r} occur in only one tree"
        )
    if not t1.label_set:
        raise LabelSetMismatch("both label sets are empty")
    _require_compatible(t1, t2)
    b = _Builder()
    f1, f2, chains = _core(b, t1, t2)
    return JoinResult(b.freeze(), f1, f2, chains)


def _core(b: _Builder, t1: ATree, t2: ATree):
    r1 = cluster_representation(t1)
    r2 = cluster_representation(t2)
    clusters = sorted(r1.clusters | r2.clusters, key=cluster_sort_key)
    chains = {}
    for y in clusters:
        n = max(r1.multiplicity.get(y, 0), r2.multiplicity.get(y, 0))
        chain = [b.new() for _ in range(n)]
        for lower, upper in zip(chain, chain[1:]):
            b.attach(upper, lower)
        chains[y] = chain

    # smallest strict supercluster; laminarity makes it unique
    owner = {}
    top = None
    for y in reversed(clusters):
        anyone = next(iter(y))
        if anyone in owner:
            b.attach(chains[owner[anyone]][0], chains[y][-1])
        else:
            top = y
        for a in y:
            owner[a] = y
    b.root = chains[top][-1]
    own = {}
    for a, y in owner.items():
        own.setdefault(y, []).append(a)
    for y, labs in own.items():
        if len(labs) == 1:  # always the case for trees; the rule needs exactly one
            b.labels[chains[y][0]] = labs[0]

    f1 = {v: chains[y][i] for y, vs in r1.chains.items() for i, v in enumerate(vs)}
    f2 = {v: chains[y][i] for y, vs in r2.chains.items() for i, v in enumerate(vs)}
    return f1, f2, {y: tuple(c) for y, c in chains.items()}


def join(t1: ATree, t2: ATree) -> JoinResult:
    """Join of two compatible A-trees with arbitrary label sets.

    Raises IncompatibleTrees carrying the cluster certificates otherwise.
    """
    _require_compatible(t1, t2)
    pair = common_restriction_pair(t1, t2)
    b = _Builder()
    if not pair.common:
        return _disjoint(b, t1, t2)

    g1, g2, chains = _core(b, pair.bar1, pair.bar2)

    # a core node hit by a t1 node and a t2 node that carry different private
    # labels gets split; the t1 preimage moves to the new node
    private1 = {v: a for v, a in t1.labeling.items() if a not in pair.common}
    private2 = {v: a for v, a in t2.labeling.items() if a not in pair.common}
    hit2 = {g2[v]: v for v in private2 if v in g2}
    clashes = sorted(
        (a, v) for v, a in private1.items() if v in g1 and g1[v] in hit2
    )
    for _, v in clashes:
        g1[v] = b.insert_above(g1[v])

    f1 = _graft(b, t1, g1, private1)
    f2 = _graft(b, t2, g2, private2)
    return JoinResult(b.freeze(), f1, f2, chains)


def _graft(b: _Builder, t: ATree, g: dict, private: dict) -> dict:
    """Add the nodes of ``t`` missing from ``g`` and place private labels."""
    f = dict(g)
    for v in t.nodes:  # preorder, so parents are mapped first
        if v not in f:
            w = b.new()
            b.attach(f[t.parent(v)], w)
            f[v] = w
    for v, a in private.items():
        b.labels[f[v]] = a
    return f


def _disjoint(b: _Builder, t1: ATree, t2: ATree) -> JoinResult:
    if t1.is_empty() or t2.is_empty():
        src, empty_first = (t2, True) if t1.is_empty() else (t1, False)
        f = _copy_into(b, src, None)
        fs = ({}, f) if empty_first else (f, {})
        return JoinResult(b.freeze() if f else ATree.empty(), *fs)
    root = b.new()
    b.root = root
    f1 = _copy_into(b, t1, root)
    f2 = _copy_into(b, t2, root)
    return JoinResult(b.freeze(), f1, f2, {}, True)


def _copy_into(b: _Builder, t: ATree, under) -> dict:
    f = {}
    for v in t.nodes:
        w = b.new()
        p = t.parent(v)
        if p is None:
            if under is None:
                b.root = w
            else:
                b.attach(under, w)
        else:
            b.attach(f[p], w)
        f[v] = w
        a = t.label(v)
        if a is not None:
            b.labels[w] = a
    return f


def blow_out(tree: ATree, node) -> tuple:
    """Insert a fresh unlabeled node on the arc entering ``node``.

    If ``node`` is the root the new node becomes the root. Returns the new
    tree and the id of the inserted node.
    """
    tree._check(node)
    (nw,) = fresh_ids(tree, 1)
    children = {v: list(tree.children(v)) for v in tree.nodes}
    children[nw] = [node]
    p = tree.parent(node)
    root = tree.root
    if p is None:
        root = nw
    else:
        kids = children[p]
        kids[kids.index(node)] = nw
    return ATree(root, children, tree.labeling), nw
