import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qdtree import (
    DecisionTree, DivergenceKind, InvariantError, PermutationError, ProbabilityVector,
    QubitCountError, TreeNode, divergence, fit_constrained, leaf_probs,
    reconstruct_tree, reorder_tree,
)
from qdtree.dtree import permute_probs, tree_from_dict, tree_to_dict, tree_to_dot
from conftest import BELL_PROBS, THREE_QUBIT_PROBS, PRODUCT_PROBS

TV = DivergenceKind.TOTAL_VARIATION
KL = DivergenceKind.KL


def prefix_mass(p, prefix):
    n = int(math.log2(len(p)))
    return sum(p[k] for k in range(len(p)) if format(k, f"0{n}b").startswith(prefix))


def conditional_oracle(p, prefix):
    """P(next bit = 0 | prefix), by enumeration over all bitstrings."""
    return prefix_mass(p, prefix + "0") / prefix_mass(p, prefix)


def random_probs(rng, n, zeros=0.0):
    p = rng.random(2**n)
    p[rng.random(2**n) < zeros] = 0.0
    if p.sum() == 0:
        p[0] = 1.0
    return p / p.sum()


def test_reconstruct_three_qubit():
    t = reconstruct_tree(THREE_QUBIT_PROBS)
    assert t.num_levels == 3
    expected = {
        "": 0.69,
        "0": 0.61 / 0.69, "1": 0.18 / 0.31,
        "00": 0.36 / 0.61, "01": 0.5, "10": 0.5, "11": 0.04 / 0.13,
    }
    for prefix, p0 in expected.items():
        assert t.node_at(prefix).p0 == pytest.approx(p0, abs=1e-12)
        assert t.node_at(prefix).p0 == pytest.approx(conditional_oracle(THREE_QUBIT_PROBS, prefix), abs=1e-12)


def test_reconstruct_bell_prunes_zero_children():
    t = reconstruct_tree(BELL_PROBS)
    assert t.root.p0 == 0.5
    assert t.node_at("0").p0 == 1.0
    assert t.node_at("1").p0 == 0.0
    # deepest nodes carry implicit leaves only
    assert t.node_at("0").child0 is None and t.node_at("0").child1 is None


def test_reconstruct_prunes_internal_subtree():
    t = reconstruct_tree([0.5, 0.5, 0, 0, 0, 0, 0, 0])
    assert t.root.p0 == 1.0
    assert t.root.child1 is None
    assert t.node_at("0").p0 == 1.0 and t.node_at("0").child1 is None


def test_reconstruct_entangled_diagonal():
    t = reconstruct_tree([0.81, 0.09, 0.01, 0.09])
    assert t.root.p0 == pytest.approx(0.9, abs=1e-12)
    assert t.node_at("0").p0 == pytest.approx(0.9, abs=1e-12)
    assert t.node_at("1").p0 == pytest.approx(0.1, abs=1e-12)


def test_reconstruct_rejects_bad_input():
    with pytest.raises(InvariantError):
        reconstruct_tree([0.5, 0.6])
    with pytest.raises(InvariantError):
        reconstruct_tree([0.5, 0.25, 0.25])
    with pytest.raises(InvariantError):
        reconstruct_tree([1.2, -0.2])


@pytest.mark.parametrize("tree, expected", [
    (DecisionTree(2, TreeNode(0.5, TreeNode(1.0), TreeNode(0.0))), BELL_PROBS),
    (DecisionTree(1, TreeNode(1.0)), [1.0, 0.0]),
])
def test_leaf_probs(tree, expected):
    assert leaf_probs(tree).probs.tolist() == expected


def test_leaf_probs_round_trip_three_qubit():
    assert np.allclose(leaf_probs(reconstruct_tree(THREE_QUBIT_PROBS)).probs, THREE_QUBIT_PROBS, atol=1e-12, rtol=0)


def test_tree_invariants_enforced():
    with pytest.raises(InvariantError, match="p0"):
        DecisionTree(1, TreeNode(1.5))
    with pytest.raises(InvariantError, match="missing"):
        DecisionTree(2, TreeNode(0.5, TreeNode(0.5), None))
    with pytest.raises(InvariantError, match="present"):
        DecisionTree(2, TreeNode(1.0, TreeNode(0.5), TreeNode(0.5)))
    with pytest.raises(InvariantError, match="exceeds"):
        DecisionTree(1, TreeNode(1.0, TreeNode(0.5), None))


@given(st.integers(0, 2**32 - 1), st.integers(1, 6), st.sampled_from([0.0, 0.3, 0.7]))
def test_round_trip_property(seed, n, zeros):
    p = random_probs(np.random.default_rng(seed), n, zeros)
    t = reconstruct_tree(p)
    back = leaf_probs(t).probs
    assert np.max(np.abs(back - ProbabilityVector(p).probs)) <= 1e-12
    assert abs(math.fsum(back) - 1) <= 1e-9
    for prefix, node in t.nodes():
        assert 0.0 <= node.p0 <= 1.0
        assert node.p0 + node.p1 == pytest.approx(1.0, abs=0)


# divergence

@pytest.mark.parametrize("measure", [TV, KL])
def test_divergence_identity(measure):
    assert divergence(THREE_QUBIT_PROBS, THREE_QUBIT_PROBS, measure) == 0.0


def test_divergence_values():
    assert divergence(BELL_PROBS, [0.25] * 4, TV) == pytest.approx(0.5)
    assert divergence([1, 0], [0.5, 0.5], KL) == pytest.approx(math.log(2), abs=1e-15)
    assert divergence([0.5, 0.5], [1, 0], KL) == math.inf
    with pytest.raises(ValueError):
        divergence([1, 0], [1, 0, 0, 0])


# constrained fit

@pytest.mark.parametrize("p, a, c, residual", [
    (PRODUCT_PROBS, 0.6, 0.7, 0.0),
    ([0.25] * 4, 0.5, 0.5, 0.0),
    (BELL_PROBS, 0.5, 0.5, 0.5),
])
def test_fit_constrained(p, a, c, residual):
    fit = fit_constrained(p, TV)
    assert fit.a == pytest.approx(a, abs=1e-12)
    assert fit.c == pytest.approx(c, abs=1e-12)
    assert fit.residual == pytest.approx(residual, abs=1e-12)


def test_fit_bell_prediction_is_uniform():
    fit = fit_constrained(BELL_PROBS)
    assert np.allclose(fit.predicted.probs, [0.25] * 4)
    assert fit_constrained(BELL_PROBS, KL).residual == math.inf


def test_fit_rejects_wrong_size():
    with pytest.raises(QubitCountError):
        fit_constrained([0.5, 0.5])
    with pytest.raises(QubitCountError):
        fit_constrained(THREE_QUBIT_PROBS)


@given(st.floats(0, 1), st.floats(0, 1))
def test_fit_exact_for_products(a, c):
    fit = fit_constrained([a * c, a * (1 - c), (1 - a) * c, (1 - a) * (1 - c)])
    assert abs(fit.a - a) <= 1e-12 and abs(fit.c - c) <= 1e-12
    assert fit.residual <= 1e-12


def test_residual_zero_iff_product_on_grid():
    """Brute-force sweep over a 0.1 grid; AD - BC is either 0 or >= 0.01 apart."""
    steps = [i / 10 for i in range(11)]
    seen = set()
    for A, B, C in itertools.product(steps, repeat=3):
        D = 1 - A - B - C
        if D < -1e-12:
            continue
        D = max(D, 0.0)
        fit = fit_constrained([A, B, C, D])
        product = abs(A * D - B * C) <= 1e-9
        assert (fit.residual <= 1e-9) == product
        seen.add(product)
    assert seen == {True, False}


def test_tv_residual_is_twice_dependence():
    # each predicted leaf is off by exactly |AD - BC|
    for p in ([0.1, 0.2, 0.3, 0.4], [0.7, 0.1, 0.05, 0.15], BELL_PROBS):
        A, B, C, D = p
        assert fit_constrained(p).residual == pytest.approx(2 * abs(A * D - B * C), abs=1e-12)


# measurement order

def test_reorder_identity():
    assert reorder_tree(PRODUCT_PROBS, [0, 1]) == reconstruct_tree(PRODUCT_PROBS)


def test_reorder_swap():
    t = reorder_tree(PRODUCT_PROBS, [1, 0])
    assert t.root.p0 == pytest.approx(0.7, abs=1e-12)
    assert t.node_at("0").p0 == pytest.approx(0.6, abs=1e-12)


def test_reorder_bell_symmetric():
    assert reorder_tree(BELL_PROBS, [1, 0]) == reconstruct_tree(BELL_PROBS)


@pytest.mark.parametrize("perm", [[0, 0], [0, 2], [1], ["a", 0]])
def test_reorder_rejects_bad_perm(perm):
    with pytest.raises(PermutationError):
        reorder_tree(PRODUCT_PROBS, perm)


@given(st.integers(0, 2**32 - 1), st.integers(1, 5), st.randoms(use_true_random=False))
def test_reorder_permutes_bits(seed, n, rnd):
    p = random_probs(np.random.default_rng(seed), n, 0.2)
    perm = list(range(n))
    rnd.shuffle(perm)
    leaves = leaf_probs(reorder_tree(p, perm)).probs
    pv = ProbabilityVector(p).probs
    assert sorted(leaves.round(12)) == sorted(pv.round(12))
    for k in range(2**n):
        bits = format(k, f"0{n}b")
        old = ["0"] * n
        for i, q in enumerate(perm):
            old[q] = bits[i]
        assert abs(leaves[k] - pv[int("".join(old), 2)]) <= 1e-12


# subnormal prefix masses make any conditional lose relative precision
marginal = st.one_of(st.sampled_from([0.0, 1.0]), st.floats(1e-6, 1 - 1e-6))


@given(st.lists(marginal, min_size=1, max_size=4), st.randoms(use_true_random=False))
def test_reorder_product_layers_are_marginals(marginals, rnd):
    n = len(marginals)
    p = np.array([1.0])
    for m in marginals:
        p = np.kron(p, [m, 1 - m])
    perm = list(range(n))
    rnd.shuffle(perm)
    t = reorder_tree(p, perm)
    for prefix, node in t.nodes():
        assert node.p0 == pytest.approx(marginals[perm[len(prefix)]], abs=1e-9)


def test_permute_probs_three_qubits():
    # qubit 2 first, then 0, then 1: new bits (b2, b0, b1)
    p = np.arange(8) / 28
    out = permute_probs(p, [2, 0, 1]).probs
    assert out[int("100", 2)] == pytest.approx(p[int("001", 2)])
    assert out[int("001", 2)] == pytest.approx(p[int("010", 2)])


# serialization

@given(st.integers(0, 2**32 - 1), st.integers(1, 4), st.sampled_from([0.0, 0.5]))
def test_json_round_trip(seed, n, zeros):
    t = reconstruct_tree(random_probs(np.random.default_rng(seed), n, zeros))
    assert tree_from_dict(tree_to_dict(t)) == t


def test_tree_from_dict_rejects_malformed():
    with pytest.raises(InvariantError):
        tree_from_dict({"levels": 1})
    with pytest.raises(InvariantError):
        tree_from_dict({"levels": 1, "node": {"p0": "x"}})
    with pytest.raises(InvariantError):
        tree_from_dict({"levels": 2, "node": {"p0": 0.5, "child0": None, "child1": None}})


def test_dot_bell():
    dot = tree_to_dot(reconstruct_tree(BELL_PROBS))
    edges = [line.strip() for line in dot.splitlines() if "->" in line]
    assert edges == [
        '"ε" -> "0" [label="0.5"];',
        '"ε" -> "1" [label="0.5"];',
        '"0" -> "00" [label="1"];',
        '"1" -> "11" [label="1"];',
    ]


def test_dot_labels_six_significant_digits():
    dot = tree_to_dot(reconstruct_tree(THREE_QUBIT_PROBS))
    assert '"ε" -> "0" [label="0.69"];' in dot
    assert '"0" -> "00" [label="0.884058"];' in dot
