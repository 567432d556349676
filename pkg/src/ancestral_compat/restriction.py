"""Restriction to a label subset and suppression of unlabeled elementary nodes."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .tree import ATree


@dataclass(frozen=True)
class RestrictedPair:
    bar1: ATree
    bar2: ATree
    common: frozenset


def restrict(tree: ATree, labels: Iterable) -> ATree:
    """Subtree supported on the nodes having some descendant labeled in ``labels``.

    Node ids are preserved. Labels outside ``labels`` are dropped; the result
    is empty when no label of ``tree`` is kept.
    """
    keep_labels = frozenset(labels)
    if tree.is_empty():
        return tree
    keep = {}
    for v in tree.postorder():
        lab = tree.label(v)
        keep[v] = (lab is not None and lab in keep_labels) or any(
            keep[c] for c in tree.children(v)
        )
    if not keep[tree.root]:
        return ATree.empty()
    children = {v: [c for c in tree.children(v) if keep[c]] for v in tree.nodes if keep[v]}
    labeling = {
        v: a for v, a in tree.labeling.items() if a in keep_labels and keep[v]
    }
    return ATree(tree.root, children, labeling)


def common_restriction_pair(t1: ATree, t2: ATree) -> RestrictedPair:
    common = t1.label_set & t2.label_set
    return RestrictedPair(restrict(t1, common), restrict(t2, common), common)


def normalize_semilabeled(tree: ATree) -> ATree:
    """Contract every maximal chain of unlabeled elementary nodes onto its end.

    The lowest node of each chain keeps its id; the unlabeled elementary nodes
    above it disappear, and their parent (if any) adopts it directly.
    """
    if tree.is_empty():
        return tree

    def skip(v):
        while tree.label(v) is None and len(tree.children(v)) == 1:
            v = tree.children(v)[0]
        return v

    root = skip(tree.root)
    children = {}
    stack = [root]
    while stack:
        v = stack.pop()
        kids = [skip(c) for c in tree.children(v)]
        children[v] = kids
        stack.extend(kids)
    labeling = {v: a for v, a in tree.labeling.items() if v in children}
    return ATree(root, children, labeling)
