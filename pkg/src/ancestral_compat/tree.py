"""Rooted trees with a partial, injective node labeling (A-trees).

An :class:`ATree` is immutable once built. Nodes are arbitrary hashable ids;
labels are plain strings restricted to Newick-safe tokens. Child order is kept
for reproducible output but never affects clusters, isomorphism or any
compatibility test.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Hashable, Iterable, Iterator, Mapping

from .errors import (
    CycleDetected,
    DuplicateLabel,
    EmptyLabelSet,
    InvalidLabel,
    LabelNotPresent,
    MultipleParents,
    MultipleRoots,
    TreeError,
    UnknownNode,
    UnlabeledLeaf,
)

NodeId = Hashable
Label = str
Cluster = frozenset

LABEL_RE = re.compile(r"[A-Za-z0-9_.|-]+")


def check_label(label) -> str:
    if not isinstance(label, str) or not LABEL_RE.fullmatch(label):
        raise InvalidLabel(f"invalid label {label!r}: expected a token of [A-Za-z0-9_.|-]+")
    return label


class ATree:
    """Immutable rooted tree with injectively labeled nodes.

    Use :func:`build_tree` to construct one from an edge list. The constructor
    itself trusts its input apart from the cheap structural checks in
    :meth:`_index`; internal modules call it with already consistent data.
    """

    __slots__ = (
        "_root",
        "_children",
        "_parent",
        "_labels",
        "_node_of",
        "_preorder",
        "_tin",
        "_tout",
        "_depth",
        "_clusters",
    )

    def __init__(self, root, children: Mapping, labels: Mapping):
        self._root = root
        self._children = {v: tuple(cs) for v, cs in children.items()}
        self._labels = dict(labels)
        self._clusters = None
        if root is None:
            self._children = {}
            self._labels = {}
        self._index()

    @classmethod
    def empty(cls) -> "ATree":
        return cls(None, {}, {})

    def _index(self):
        parent = {}
        preorder = []
        tin = {}
        tout = {}
        depth = {}
        if self._root is not None:
            self._children.setdefault(self._root, ())
            stack = [(self._root, 0, False)]
            while stack:
                v, d, done = stack.pop()
                if done:
                    tout[v] = len(preorder)
                    continue
                if v in tin:
                    raise CycleDetected(f"node {v!r} reached twice")
                tin[v] = len(preorder)
                depth[v] = d
                preorder.append(v)
                stack.append((v, d, True))
                kids = self._children.setdefault(v, ())
                for c in reversed(kids):
                    if c in parent:
                        raise MultipleParents(f"node {c!r} has more than one parent")
                    parent[c] = v
                    stack.append((c, d + 1, False))
        if len(preorder) != len(self._children):
            stray = [v for v in self._children if v not in tin]
            raise TreeError(f"nodes not reachable from the root: {stray[:5]!r}")
        node_of = {}
        for v, a in self._labels.items():
            if v not in tin:
                raise UnknownNode(f"label {a!r} assigned to unknown node {v!r}")
            if a in node_of:
                raise DuplicateLabel(f"label {a!r} used on more than one node")
            node_of[a] = v
        self._parent = parent
        self._preorder = tuple(preorder)
        self._tin = tin
        self._tout = tout
        self._depth = depth
        self._node_of = node_of

    # basic structure -------------------------------------------------------

    @property
    def root(self):
        return self._root

    @property
    def nodes(self) -> tuple:
        """All nodes in preorder (children visited in stored order)."""
        return self._preorder

    def __len__(self):
        return len(self._preorder)

    def __contains__(self, v):
        return v in self._tin

    def __iter__(self) -> Iterator:
        return iter(self._preorder)

    def is_empty(self) -> bool:
        return self._root is None

    def _check(self, v):
        if v not in self._tin:
            raise UnknownNode(f"unknown node {v!r}")

    def children(self, v) -> tuple:
        self._check(v)
        return self._children[v]

    def parent(self, v):
        """Parent of ``v``, or ``None`` for the root."""
        self._check(v)
        return self._parent.get(v)

    def label(self, v):
        """Label of ``v``, or ``None`` when unlabeled."""
        self._check(v)
        return self._labels.get(v)

    def depth(self, v) -> int:
        self._check(v)
        return self._depth[v]

    def is_leaf(self, v) -> bool:
        return not self.children(v)

    def is_elementary(self, v) -> bool:
        return len(self.children(v)) == 1

    def node_of(self, label):
        """The node carrying ``label``."""
        try:
            return self._node_of[label]
        except KeyError:
            raise LabelNotPresent(f"label {label!r} not in tree") from None

    @property
    def labeling(self) -> dict:
        return dict(self._labels)

    @property
    def label_set(self) -> frozenset:
        return frozenset(self._node_of)

    @property
    def leaf_labels(self) -> frozenset:
        return frozenset(a for a, v in self._node_of.items() if not self._children[v])

    def edges(self) -> list:
        return [(self._parent[v], v) for v in self._preorder if v in self._parent]

    def postorder(self) -> list:
        """Nodes ordered so that every node comes after all its descendants."""
        return list(reversed(self._preorder))

    def is_ancestor(self, u, v) -> bool:
        """True iff there is a (possibly trivial) path u ~> v."""
        self._check(u)
        self._check(v)
        return self._tin[u] <= self._tin[v] and self._tout[v] <= self._tout[u]

    def clusters(self) -> dict:
        """Map node -> cluster (frozenset of labels on the node and below)."""
        if self._clusters is None:
            cl = {}
            for v in reversed(self._preorder):
                own = self._labels.get(v)
                acc = set() if own is None else {own}
                for c in self._children[v]:
                    acc |= cl[c]
                cl[v] = frozenset(acc)
            self._clusters = cl
        return self._clusters

    def __repr__(self):
        if self._root is None:
            return "ATree(<empty>)"
        from .newick import serialize_newick

        return f"ATree({serialize_newick(self)!r})"

    def __reduce__(self):
        return (ATree, (self._root, self._children, self._labels))


def build_tree(edges: Iterable, labeling: Mapping | None = None) -> ATree:
    """Build and validate an A-tree from ``(parent, child)`` pairs.

    Nodes are every id mentioned in ``edges`` plus the keys of ``labeling``
    (so a single-node tree is ``build_tree([], {"a": "A"})``). Children keep
    the order in which their arcs appear.

    Raises CycleDetected, MultipleRoots, MultipleParents, DuplicateLabel,
    UnlabeledLeaf or InvalidLabel.
    """
    labeling = dict(labeling or {})
    edges = list(edges)
    children: dict = {}
    parent: dict = {}
    for p, c in edges:
        children.setdefault(p, [])
        children.setdefault(c, [])
        if c in parent:
            raise MultipleParents(f"node {c!r} has more than one parent")
        parent[c] = p
        children[p].append(c)
    for v in labeling:
        children.setdefault(v, [])
    if not children:
        return ATree.empty()
    seen = {}
    for v, a in labeling.items():
        check_label(a)
        if a in seen:
            raise DuplicateLabel(f"label {a!r} assigned to nodes {seen[a]!r} and {v!r}")
        seen[a] = v
    roots = [v for v in children if v not in parent]
    if not roots:
        raise CycleDetected("every node has a parent; the arcs contain a cycle")
    if len(roots) > 1:
        raise MultipleRoots(f"{len(roots)} candidate roots: {roots[:5]!r}")
    try:
        tree = ATree(roots[0], children, labeling)
    except TreeError as exc:
        if isinstance(exc, (DuplicateLabel, MultipleParents)):
            raise
        raise CycleDetected(str(exc)) from None
    for v in tree.nodes:
        if not tree.children(v) and tree.label(v) is None:
            raise UnlabeledLeaf(f"leaf {v!r} is unlabeled")
    return tree


# queries -------------------------------------------------------------------


def cluster_of(tree: ATree, v) -> frozenset:
    """Labels of ``v`` and all its descendants."""
    tree._check(v)
    return tree.clusters()[v]


@dataclass(frozen=True)
class ClusterRepresentation:
    """The set of clusters of a tree with multiplicities.

    ``chains[Y]`` lists the nodes whose cluster is ``Y`` from the lowest one
    up; consecutive entries are child and parent. ``anchor[Y]`` is the lowest
    of them, i.e. the most recent common ancestor of the labels in ``Y``.
    """

    clusters: frozenset
    multiplicity: dict
    anchor: dict
    chains: dict

    def sorted_clusters(self) -> list:
        return sorted(self.clusters, key=cluster_sort_key)


def cluster_sort_key(cluster) -> tuple:
    """Order clusters by size, then by their sorted member list."""
    return (len(cluster), sorted(cluster))


def cluster_representation(tree: ATree) -> ClusterRepresentation:
    cl = tree.clusters()
    chains: dict = {}
    for v in tree.postorder():
        chains.setdefault(cl[v], []).append(v)
    chains = {y: tuple(vs) for y, vs in chains.items()}
    return ClusterRepresentation(
        clusters=frozenset(chains),
        multiplicity={y: len(vs) for y, vs in chains.items()},
        anchor={y: vs[0] for y, vs in chains.items()},
        chains=chains,
    )


def mrca(tree: ATree, labels: Iterable) -> object:
    """Most recent common ancestor of the nodes labeled by ``labels``."""
    labels = list(labels)
    if not labels:
        raise EmptyLabelSet("mrca of an empty label set")
    nodes = [tree.node_of(a) for a in labels]
    return mrca_nodes(tree, nodes)


def mrca_nodes(tree: ATree, nodes: Iterable):
    it = iter(nodes)
    try:
        acc = next(it)
    except StopIteration:
        raise EmptyLabelSet("mrca of an empty node set") from None
    tree._check(acc)
    depth = tree._depth
    parent = tree._parent
    for v in it:
        tree._check(v)
        while depth[v] > depth[acc]:
            v = parent[v]
        while depth[acc] > depth[v]:
            acc = parent[acc]
        while acc != v:
            acc = parent[acc]
            v = parent[v]
    return acc


def has_path(tree: ATree, u, v) -> bool:
    """True iff ``v`` is ``u`` or a descendant of ``u``."""
    return tree.is_ancestor(u, v)


def is_semilabeled(tree: ATree) -> bool:
    """True iff every elementary (single-child) node is labeled."""
    return all(
        tree._labels.get(v) is not None
        for v in tree.nodes
        if len(tree._children[v]) == 1
    )


def _shape_codes(tree: ATree, table: dict) -> dict:
    code = {}
    for v in tree.postorder():
        key = (tree._labels.get(v), tuple(sorted(code[c] for c in tree._children[v])))
        code[v] = table.setdefault(key, len(table))
    return code


def isomorphic(t1: ATree, t2: ATree) -> bool:
    """Label-preserving rooted isomorphism, ignoring child order."""
    if len(t1) != len(t2) or t1.label_set != t2.label_set:
        return False
    if t1.is_empty():
        return True
    table: dict = {}
    return _shape_codes(t1, table)[t1.root] == _shape_codes(t2, table)[t2.root]


def node_path(tree: ATree, v) -> str:
    """Child-index path from the root, e.g. ``"/"`` or ``"/0/2"``."""
    steps = []
    tree._check(v)
    while v != tree.root:
        p = tree._parent[v]
        steps.append(tree._children[p].index(v))
        v = p
    return "/" + "/".join(str(i) for i in reversed(steps))


def node_at_path(tree: ATree, path: str):
    v = tree.root
    for part in path.strip("/").split("/") if path.strip("/") else []:
        v = tree.children(v)[int(part)]
    return v


def fresh_ids(tree: ATree, count: int) -> list:
    """``count`` integer ids not used by ``tree``."""
    used = [v for v in tree.nodes if isinstance(v, int) and not isinstance(v, bool)]
    start = max(used, default=-1) + 1
    return list(range(start, start + count))


def relabel_nodes(tree: ATree, mapping: Mapping) -> ATree:
    """Copy of ``tree`` with node ids renamed through ``mapping``."""
    if tree.is_empty():
        return tree
    children = {mapping[v]: [mapping[c] for c in tree._children[v]] for v in tree.nodes}
    labels = {mapping[v]: a for v, a in tree._labels.items()}
    return ATree(mapping[tree.root], children, labels)
