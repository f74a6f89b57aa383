"""Exception types shared across the package."""


class InvariantError(ValueError):
    """Input violates a documented invariant of a state, vector or tree."""


class QubitCountError(ValueError):
    """Operation is defined only for a specific number of qubits."""


class PermutationError(ValueError):
    """A measurement-order permutation is malformed."""
