"""Newick reading and writing for A-trees with internal node labels.

Grammar accepted::

    tree    := subtree ";"
    subtree := label | "(" subtree ("," subtree)* ")" [label]
    label   := [A-Za-z0-9_.|-]+

Whitespace between tokens is ignored. Branch lengths, quoted labels and
bracket comments are rejected rather than silently dropped.
"""

from __future__ import annotations

from .errors import EmptyTree, NewickSyntaxError, UnlabeledLeaf
from .tree import ATree, build_tree

_LABEL_CHARS = frozenset(
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789_.|-"
)
_UNSUPPORTED = {
    ":": "branch lengths are not supported",
    "'": "quoted labels are not supported",
    '"': "quoted labels are not supported",
    "[": "comments are not supported",
}


def parse_newick(text: str) -> list[ATree]:
    """Parse every ``;``-terminated tree in ``text``, in order.

    Node ids are consecutive integers in preorder, the root being 0.
    """
    if text.startswith("﻿"):
        text = text[1:]
    trees = []
    pos = _skip_ws(text, 0)
    while pos < len(text):
        tree, pos = _parse_one(text, pos)
        trees.append(tree)
        pos = _skip_ws(text, pos)
    return trees


def parse_one(text: str) -> ATree:
    """Parse text that must hold exactly one tree."""
    trees = parse_newick(text)
    if len(trees) != 1:
        raise NewickSyntaxError(f"expected exactly one tree, found {len(trees)}", 0)
    return trees[0]


def _skip_ws(text, pos):
    n = len(text)
    while pos < n and text[pos].isspace():
        pos += 1
    return pos


def _read_label(text, pos):
    start = pos
    n = len(text)
    while pos < n and text[pos] in _LABEL_CHARS:
        pos += 1
    return text[start:pos], pos


def _fail(text, pos, expected):
    if pos >= len(text):
        raise NewickSyntaxError(f"unexpected end of input, expected {expected}", pos, text)
    ch = text[pos]
    if ch in _UNSUPPORTED:
        raise NewickSyntaxError(_UNSUPPORTED[ch], pos, text)
    raise NewickSyntaxError(f"unexpected character {ch!r}, expected {expected}", pos, text)


def _parse_one(text, pos):
    edges = []
    labels = {}
    counter = 0
    stack = []  # open groups
    root = None
    pos = _skip_ws(text, pos)
    expecting_subtree = True
    while True:
        pos = _skip_ws(text, pos)
        if expecting_subtree:
            node = counter
            counter += 1
            if stack:
                edges.append((stack[-1], node))
            else:
                root = node
            if pos < len(text) and text[pos] == "(":
                stack.append(node)
                pos += 1
                continue
            label, end = _read_label(text, pos)
            if not label:
                if pos < len(text) and text[pos] in ",)":
                    raise UnlabeledLeaf(
                        f"unlabeled leaf at position {pos}", position=pos
                    )
                _fail(text, pos, "a label or '('")
            labels[node] = label
            pos = end
            expecting_subtree = False
            continue
        # after a complete subtree
        if pos >= len(text):
            _fail(text, pos, "',', ')' or ';'")
        ch = text[pos]
        if ch == "," and stack:
            pos += 1
            expecting_subtree = True
        elif ch == ")" and stack:
            group = stack.pop()
            pos = _skip_ws(text, pos + 1)
            label, end = _read_label(text, pos)
            if label:
                labels[group] = label
                pos = end
        elif ch == ";" and not stack:
            pos += 1
            break
        elif ch in _LABEL_CHARS:
            raise NewickSyntaxError("labels may not contain whitespace", pos, text)
        else:
            _fail(text, pos, "',' or ')'" if stack else "';'")
    if not edges:
        return build_tree([], {root: labels[root]} if root in labels else {}), pos
    return build_tree(edges, labels), pos


def _min_labels(tree: ATree) -> dict:
    best = {}
    for v in tree.postorder():
        own = tree.label(v)
        cands = [best[c] for c in tree.children(v)]
        if own is not None:
            cands.append(own)
        best[v] = min(cands)
    return best


def canonicalize(tree: ATree) -> ATree:
    """Copy of ``tree`` whose children are ordered by smallest descendant label."""
    if tree.is_empty():
        return tree
    key = _min_labels(tree)
    children = {v: sorted(tree.children(v), key=key.__getitem__) for v in tree.nodes}
    return ATree(tree.root, children, tree.labeling)


def serialize_newick(tree: ATree) -> str:
    """Canonical Newick text for ``tree`` (children sorted, no whitespace)."""
    if tree.is_empty():
        raise EmptyTree("the empty tree has no Newick representation")
    t = canonicalize(tree)
    out = []
    stack = [("node", t.root)]
    while stack:
        kind, v = stack.pop()
        if kind == "text":
            out.append(v)
            continue
        kids = t.children(v)
        label = t.label(v) or ""
        if not kids:
            out.append(label)
            continue
        out.append("(")
        stack.append(("text", ")" + label))
        for i, c in enumerate(reversed(kids)):
            if i:
                stack.append(("text", ","))
            stack.append(("node", c))
    return "".join(out) + ";"
