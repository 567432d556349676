"""Exception hierarchy shared by all modules."""


class TreeError(ValueError):
    """Base class for invalid trees and invalid tree queries."""


class CycleDetected(TreeError):
    pass


class MultipleRoots(TreeError):
    pass


class MultipleParents(TreeError):
    pass


class DuplicateLabel(TreeError):
    pass


class UnlabeledLeaf(TreeError):
    def __init__(self, message, position=None):
        super().__init__(message)
        self.position = position


class InvalidLabel(TreeError):
    pass


class UnknownNode(TreeError, KeyError):
    def __str__(self):
        return ValueError.__str__(self)


class LabelNotPresent(TreeError, KeyError):
    def __str__(self):
        return ValueError.__str__(self)


class EmptyLabelSet(TreeError):
    pass


class EmptyTree(TreeError):
    pass


class NewickSyntaxError(ValueError):
    """Malformed Newick text. ``position`` is a 0-based character offset."""

    def __init__(self, message, position, text=None):
        self.position = position
        self.reason = message
        if text is not None:
            line = text.count("\n", 0, position) + 1
            col = position - (text.rfind("\n", 0, position) + 1) + 1
            message = f"{message} at position {position} (line {line}, column {col})"
        else:
            message = f"{message} at position {position}"
        super().__init__(message)


class DomainMismatch(ValueError):
    """An embedding map is not a total map from V(S) into V(T)."""


class LabelSetMismatch(ValueError):
    pass


class IncompatibleTrees(ValueError):
    """Raised by join constructions when the inputs are not compatible."""

    def __init__(self, certificates):
        self.certificates = list(certificates)
        super().__init__(
            f"trees are not ancestrally compatible ({len(self.certificates)} certificate(s))"
        )
