"""Probabilistic binary decision trees over measurement outcomes.

Each depth of the tree measures one qubit.  A node stores ``p0``, the
probability of branching to bit 0 (the left child); the 1-branch carries
``1 - p0``.  Children of the deepest internal nodes are implicit leaves.
Above that level a child is absent exactly when its branch probability
is zero.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import InvariantError, PermutationError, QubitCountError
from .qstate import ATOL, ProbabilityVector


class DivergenceKind(enum.Enum):
    TOTAL_VARIATION = "tv"
    KL = "kl"


@dataclass(frozen=True)
class TreeNode:
    p0: float
    child0: Optional[TreeNode] = None
    child1: Optional[TreeNode] = None

    @property
    def p1(self) -> float:
        return 1.0 - self.p0


@dataclass(frozen=True)
class DecisionTree:
    num_levels: int
    root: TreeNode

    def __post_init__(self):
        if self.num_levels < 1:
            raise InvariantError("num_levels must be positive")
        _check_node(self.root, 1, self.num_levels, "")

    def nodes(self):
        """Yield ``(prefix, node)`` in preorder, 0-child before 1-child."""
        stack = [("", self.root)]
        while stack:
            prefix, node = stack.pop()
            yield prefix, node
            for bit, child in (("1", node.child1), ("0", node.child0)):
                if child is not None:
                    stack.append((prefix + bit, child))

    def node_at(self, prefix: str) -> Optional[TreeNode]:
        node = self.root
        for bit in prefix:
            if node is None:
                return None
            node = node.child0 if bit == "0" else node.child1
        return node


def _check_node(node: TreeNode, depth: int, levels: int, prefix: str):
    where = prefix or "root"
    p0 = node.p0
    if not (isinstance(p0, (int, float)) and 0.0 <= p0 <= 1.0):
        raise InvariantError(f"p0 in [0, 1] violated at node {where}: {p0!r}")
    if depth == levels:
        if node.child0 is not None or node.child1 is not None:
            raise InvariantError(f"path length exceeds {levels} levels at node {where}")
        return
    for bit, child, branch in (("0", node.child0, p0), ("1", node.child1, 1.0 - p0)):
        if (child is None) != (branch == 0.0):
            state = "missing" if child is None else "present"
            raise InvariantError(
                f"child {prefix + bit} is {state} but its branch probability is {branch!r}"
            )
        if child is not None:
            _check_node(child, depth + 1, levels, prefix + bit)


@dataclass(frozen=True)
class ConstrainedFit:
    a: float
    c: float
    residual: float
    predicted: ProbabilityVector
    measure: DivergenceKind


def _build(p: np.ndarray, levels_left: int) -> TreeNode:
    half = p.size // 2
    m0 = math.fsum(p[:half])
    m1 = math.fsum(p[half:])
    p0 = m0 / (m0 + m1)
    if levels_left == 1:
        return TreeNode(p0)
    child0 = _build(p[:half], levels_left - 1) if p0 > 0.0 else None
    child1 = _build(p[half:], levels_left - 1) if p0 < 1.0 else None
    return TreeNode(p0, child0, child1)


def reconstruct_tree(p: ProbabilityVector | Sequence[float]) -> DecisionTree:
    """Exact tree whose leaves reproduce ``p``.

    Every node branches on the conditional probability of the next bit
    being 0 given its path prefix. Zero-mass prefixes are pruned.
    """
    pv = p if isinstance(p, ProbabilityVector) else ProbabilityVector(p)
    n = pv.num_qubits
    return DecisionTree(n, _build(pv.probs, n))


def leaf_probs(t: DecisionTree) -> ProbabilityVector:
    n = t.num_levels
    out = np.zeros(2**n)

    def walk(node: TreeNode, depth: int, index: int, mass: float):
        for bit, child, branch in ((0, node.child0, node.p0), (1, node.child1, 1.0 - node.p0)):
            k = (index << 1) | bit
            if depth == n:
                out[k] = mass * branch
            elif child is not None:
                walk(child, depth + 1, k, mass * branch)

    walk(t.root, 1, 0, 1.0)
    return ProbabilityVector(out)


def divergence(p, q, measure: DivergenceKind = DivergenceKind.TOTAL_VARIATION) -> float:
    """Discrepancy between two distributions.

    KL is D(p || q) in nats and is ``math.inf`` when p puts mass where q
    has none.
    """
    pa = np.asarray(p.probs if isinstance(p, ProbabilityVector) else p, dtype=float)
    qa = np.asarray(q.probs if isinstance(q, ProbabilityVector) else q, dtype=float)
    if pa.shape != qa.shape:
        raise ValueError(f"length mismatch: {pa.size} vs {qa.size}")
    measure = DivergenceKind(measure)
    if measure is DivergenceKind.TOTAL_VARIATION:
        return 0.5 * math.fsum(np.abs(pa - qa))
    support = pa > 0
    if np.any(qa[support] == 0):
        return math.inf
    return math.fsum(pa[support] * np.log(pa[support] / qa[support]))


def fit_constrained(
    p: ProbabilityVector | Sequence[float],
    measure: DivergenceKind = DivergenceKind.TOTAL_VARIATION,
) -> ConstrainedFit:
    """Two-qubit tree with one branch probability per layer.

    ``a`` is the first-layer branch-to-0 probability (marginal of the
    first qubit), ``c`` the shared second-layer one (marginal of the
    second qubit). The fit is exact iff the distribution is a product,
    i.e. A*D == B*C.
    """
    pv = p if isinstance(p, ProbabilityVector) else ProbabilityVector(p)
    if len(pv) != 4:
        raise QubitCountError(f"constrained fit needs 4 probabilities, got {len(pv)}")
    A, B, C, _ = pv.probs
    a = float(A + B)
    c = float(A + C)
    predicted = ProbabilityVector([a * c, a * (1 - c), (1 - a) * c, (1 - a) * (1 - c)])
    measure = DivergenceKind(measure)
    return ConstrainedFit(a, c, divergence(predicted, pv, measure), predicted, measure)


def _validate_perm(perm: Sequence[int], n: int) -> tuple[int, ...]:
    try:
        perm = tuple(int(i) for i in perm)
    except (TypeError, ValueError) as exc:
        raise PermutationError(f"permutation entries must be integers: {perm!r}") from exc
    if sorted(perm) != list(range(n)):
        raise PermutationError(f"{list(perm)} is not a permutation of 0..{n - 1}")
    return perm


def permute_probs(p: ProbabilityVector | Sequence[float], perm: Sequence[int]) -> ProbabilityVector:
    """Distribution seen when qubit ``perm[i]`` is measured at step ``i``."""
    pv = p if isinstance(p, ProbabilityVector) else ProbabilityVector(p)
    n = pv.num_qubits
    perm = _validate_perm(perm, n)
    return ProbabilityVector(np.transpose(pv.probs.reshape((2,) * n), perm).reshape(-1))


def reorder_tree(p: ProbabilityVector | Sequence[float], perm: Sequence[int]) -> DecisionTree:
    return reconstruct_tree(permute_probs(p, perm))


def tree_to_dict(t: DecisionTree) -> dict:
    def enc(node):
        if node is None:
            return None
        return {"p0": node.p0, "child0": enc(node.child0), "child1": enc(node.child1)}

    return {"levels": t.num_levels, "node": enc(t.root)}


def tree_from_dict(data: dict) -> DecisionTree:
    def dec(obj, path):
        if obj is None:
            return None
        if not isinstance(obj, dict) or "p0" not in obj:
            raise InvariantError(f"node {path or 'root'} must be an object with a p0 field")
        p0 = obj["p0"]
        if isinstance(p0, bool) or not isinstance(p0, (int, float)):
            raise InvariantError(f"p0 at node {path or 'root'} must be a number")
        return TreeNode(
            float(p0), dec(obj.get("child0"), path + "0"), dec(obj.get("child1"), path + "1")
        )

    if not isinstance(data, dict) or "levels" not in data or "node" not in data:
        raise InvariantError("tree file needs 'levels' and 'node' fields")
    levels = data["levels"]
    if isinstance(levels, bool) or not isinstance(levels, int):
        raise InvariantError("'levels' must be an integer")
    root = dec(data["node"], "")
    if root is None:
        raise InvariantError("tree root must not be null")
    return DecisionTree(levels, root)


def _dot_label(x: float) -> str:
    return f"{x:.6g}"


def tree_to_dot(t: DecisionTree) -> str:
    """Graphviz rendering. Nodes are named by path prefix, the root is "ε"."""
    lines = ["digraph tree {", '  "ε";']
    for prefix, node in t.nodes():
        src = prefix or "ε"
        leaf_level = len(prefix) + 1 == t.num_levels
        for bit, child, branch in (("0", node.child0, node.p0), ("1", node.child1, node.p1)):
            if branch == 0.0 or (child is None and not leaf_level):
                continue
            lines.append(f'  "{src}" -> "{prefix + bit}" [label="{_dot_label(branch)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
