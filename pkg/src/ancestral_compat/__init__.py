"""Ancestral compatibility of semi-labeled trees.

Decide whether two rooted trees with labeled leaves and internal nodes can
both be displayed by a common supertree, explain conflicts with certificates,
and build that supertree when it exists.
"""

from .compatibility import (
    Certificate,
    CertificateKind,
    Verdict,
    Violation,
    ancestrally_displays,
    check_c1,
    check_c2,
    cluster_compatibility,
    compatibility,
    display_embedding,
    is_compatible,
    local_compatibility,
    verify_embedding,
)
from .errors import (
    CycleDetected,
    DomainMismatch,
    DuplicateLabel,
    EmptyLabelSet,
    EmptyTree,
    IncompatibleTrees,
    InvalidLabel,
    LabelNotPresent,
    LabelSetMismatch,
    MultipleParents,
    MultipleRoots,
    NewickSyntaxError,
    TreeError,
    UnknownNode,
    UnlabeledLeaf,
)
from .join import JoinResult, blow_out, join, join_same_labels
from .newick import canonicalize, parse_newick, parse_one, serialize_newick
from .restriction import RestrictedPair, common_restriction_pair, normalize_semilabeled, restrict
from .tree import (
    ATree,
    ClusterRepresentation,
    build_tree,
    cluster_of,
    cluster_representation,
    has_path,
    is_semilabeled,
    isomorphic,
    mrca,
    node_at_path,
    node_path,
)

__version__ = "0.1.0"
