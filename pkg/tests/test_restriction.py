from ancestral_compat import (
    build_tree,
    cluster_representation,
    common_restriction_pair,
    isomorphic,
    normalize_semilabeled,
    parse_one,
    restrict,
    serialize_newick,
)

T1 = "(((A,B)C,D),(E,F,G));"
T2 = "((A,B)H,E,(J,(K)G)I);"


def test_restrict_worked_pair():
    t1, t2 = parse_one(T1), parse_one(T2)
    pair = common_restriction_pair(t1, t2)
    assert pair.common == frozenset("ABEG")
    assert isomorphic(pair.bar1, parse_one("(((A,B)),(E,G));"))
    assert isomorphic(pair.bar2, parse_one("((A,B),E,(G));"))
    assert serialize_newick(pair.bar2) == "((A,B),E,(G));"


def test_restrict_keeps_node_ids():
    t = parse_one(T1)
    r = restrict(t, "ABEG")
    assert set(r.nodes) <= set(t.nodes)
    for v in r.nodes:
        if v != r.root:
            assert r.parent(v) == t.parent(v)
    assert r.node_of("A") == t.node_of("A")
    # the C node survives as an unlabeled node
    assert r.label(t.node_of("C")) is None


def test_restrict_labels_and_leaves():
    t = parse_one(T2)
    r = restrict(t, {"G", "A", "Z"})
    assert r.label_set == frozenset("AG")
    assert r.leaf_labels == frozenset("AG")  # K is gone, so G becomes a leaf


def test_restrict_to_nothing():
    assert restrict(parse_one(T1), set()).is_empty()
    assert restrict(parse_one(T1), {"Q"}).is_empty()


def test_restrict_single_label_keeps_path():
    t = parse_one("((A,B)C,D);")
    r = restrict(t, {"A"})
    assert len(r) == 3 and r.label_set == frozenset("A")


def test_normalize_worked_restriction():
    bar1 = restrict(parse_one(T1), "ABEG")
    n = normalize_semilabeled(bar1)
    assert isomorphic(n, parse_one("((A,B),(E,G));"))
    assert cluster_representation(n).clusters == cluster_representation(bar1).clusters


def test_normalize_chain_to_leaf():
    t = build_tree([("r", "u"), ("u", "w"), ("w", "a")], {"a": "A"})
    n = normalize_semilabeled(t)
    assert len(n) == 1 and n.root == "a"


def test_normalize_keeps_labeled_elementary():
    t = parse_one("((((A)B)))C;")
    assert serialize_newick(normalize_semilabeled(t)) == "((A)B)C;"
