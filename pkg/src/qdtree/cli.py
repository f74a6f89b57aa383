"""Command-line front end.

Exit codes: 0 success, 2 unreadable input or violated invariant,
3 bad permutation, 4 wrong qubit count.
"""
from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import dtree, qstate, sampler
from . import discriminator as disc
from .errors import InvariantError, PermutationError, QubitCountError

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_PERM = 3
EXIT_QUBITS = 4


class CLIError(Exception):
    def __init__(self, message: str, code: int = EXIT_INPUT):
        super().__init__(message)
        self.code = code


def fmt(x: float) -> str:
    """12 significant digits; values below 1e-12 in magnitude print as zero."""
    x = float(x)
    if math.isinf(x) or math.isnan(x):
        return repr(x)
    return repr(float(f"{round(x, 12):.12g}") + 0.0)


def fmt_complex(z: complex) -> str:
    re, im = fmt(z.real), fmt(z.imag)
    if im == "0.0":
        return re
    sign = "-" if im.startswith("-") else "+"
    return f"{re}{sign}{im.lstrip('-')}j"


def _complex(value, where: str) -> complex:
    if isinstance(value, (list, tuple)) and len(value) == 2:
        re, im = value
    elif isinstance(value, (int, float)) and not isinstance(value, bool):
        re, im = value, 0.0
    else:
        raise InvariantError(f"{where}: expected a [re, im] pair, got {value!r}")
    if isinstance(re, bool) or isinstance(im, bool) or not all(
        isinstance(v, (int, float)) for v in (re, im)
    ):
        raise InvariantError(f"{where}: [re, im] entries must be numbers")
    return complex(re, im)


def parse_state(data) -> qstate.PureState | qstate.DensityMatrix:
    if not isinstance(data, dict):
        raise InvariantError("state file must contain a JSON object")
    kind = data.get("kind")
    qubits = data.get("qubits")
    if isinstance(qubits, bool) or not isinstance(qubits, int) or qubits < 1:
        raise InvariantError("'qubits' must be a positive integer")
    dim = 2**qubits
    if kind == "pure":
        amps = data.get("amplitudes")
        if not isinstance(amps, list) or len(amps) != dim:
            raise InvariantError(f"declared dimensions: 'amplitudes' must list {dim} entries")
        return qstate.PureState(qubits, [_complex(a, f"amplitudes[{k}]") for k, a in enumerate(amps)])
    if kind == "density":
        rows = data.get("matrix")
        if not isinstance(rows, list) or len(rows) != dim or any(
            not isinstance(r, list) or len(r) != dim for r in rows
        ):
            raise InvariantError(f"declared dimensions: 'matrix' must be {dim}x{dim}")
        matrix = [[_complex(v, f"matrix[{i}][{j}]") for j, v in enumerate(r)] for i, r in enumerate(rows)]
        return qstate.DensityMatrix(qubits, np.array(matrix))
    raise InvariantError(f"'kind' must be 'pure' or 'density', got {kind!r}")


def state_to_dict(state) -> dict:
    pairs = lambda arr: [[float(z.real), float(z.imag)] for z in arr]  # noqa: E731
    if isinstance(state, qstate.PureState):
        return {"kind": "pure", "qubits": state.num_qubits, "amplitudes": pairs(state.amplitudes)}
    return {
        "kind": "density",
        "qubits": state.num_qubits,
        "matrix": [pairs(row) for row in state.entries],
    }


def _load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise CLIError(f"cannot read {path}: {exc.strerror or exc}") from exc
    except ValueError as exc:
        raise CLIError(f"{path}: invalid JSON: {exc}") from exc


def load_state(path: str):
    return parse_state(_load_json(path))


def probs_of(state) -> qstate.ProbabilityVector:
    if isinstance(state, qstate.PureState):
        return qstate.outcome_probs(state)
    return qstate.diag_probs(state)


def density_from(state) -> qstate.DensityMatrix:
    if isinstance(state, qstate.PureState):
        return qstate.density_of(state)
    return state


def _bits(k: int, width: int) -> str:
    return format(k, f"0{width}b")


def _parse_order(text: str | None, n: int):
    if text is None:
        return list(range(n))
    try:
        return [int(tok) for tok in text.split(",")]
    except ValueError as exc:
        raise PermutationError(f"--order must be comma-separated integers, got {text!r}") from exc


def cmd_probs(args, out):
    pv = probs_of(load_state(args.statefile))
    n = pv.num_qubits
    for k, p in enumerate(pv):
        print(f"{_bits(k, n)} {fmt(p)}", file=out)


def cmd_tree(args, out):
    pv = probs_of(load_state(args.statefile))
    perm = _parse_order(args.order, pv.num_qubits)
    tree = dtree.reorder_tree(pv, perm)
    if args.format == "dot":
        out.write(dtree.tree_to_dot(tree))
    else:
        print(json.dumps(dtree.tree_to_dict(tree), indent=2), file=out)


def _require_two(n: int):
    if n != 2:
        raise QubitCountError(f"this command needs a 2-qubit state, got {n} qubits")


def cmd_fit2(args, out):
    pv = probs_of(load_state(args.statefile))
    _require_two(pv.num_qubits)
    fit = dtree.fit_constrained(pv, dtree.DivergenceKind(args.measure))
    print(f"a={fmt(fit.a)} c={fmt(fit.c)} residual={fmt(fit.residual)}", file=out)


def _print_matrix(name: str, rho: qstate.DensityMatrix, out):
    print(f"{name}:", file=out)
    for row in rho.entries:
        print("  " + " ".join(fmt_complex(z) for z in row), file=out)


def cmd_factor(args, out):
    rho = density_from(load_state(args.statefile))
    _require_two(rho.num_qubits)
    if not args.tol > 0:
        raise CLIError("--tol must be positive")
    report = qstate.factor_test(rho, args.tol)
    verdict = "separable" if report.separable else "not separable"
    print(f"{verdict}, max_deviation={fmt(report.max_deviation)}", file=out)
    _print_matrix("factor_first", report.factor_first, out)
    _print_matrix("factor_second", report.factor_second, out)


def cmd_sample(args, out):
    data = _load_json(args.file)
    if isinstance(data, dict) and "levels" in data:
        tree = dtree.tree_from_dict(data)
    else:
        tree = dtree.reconstruct_tree(probs_of(parse_state(data)))
    if args.n < 1:
        raise CLIError("-n must be at least 1")
    report = sampler.sample_tree(tree, args.n, args.seed)
    print(json.dumps(report.to_dict(), sort_keys=True), file=out)


def cmd_discriminate(args, out):
    if args.stream is not None:
        items = _load_json(args.stream)
        if not isinstance(items, list):
            raise CLIError("stream file must contain a JSON array of 3-bit strings")
        try:
            stream = disc.TripleStream.from_strings(items)
        except ValueError as exc:
            raise CLIError(f"{args.stream}: {exc}") from exc
    else:
        if args.n < 1:
            raise CLIError("-n must be at least 1")
        if not 0.0 <= args.gen <= 1.0:
            raise CLIError("--gen must lie in [0, 1]")
        stream = disc.gen_triples(args.gen, args.n, args.seed)
    if args.write_stream:
        with open(args.write_stream, "w", encoding="utf-8") as fh:
            fh.write(stream.to_json() + "\n")
    if len(stream) == 0:
        raise CLIError("stream is empty")
    est = disc.estimate_ratio(stream)
    verdict = disc.classify(est)
    print(
        f"{verdict.label.value} ratio={fmt(est.ratio)} p_s={fmt(est.p_s)} n={est.n} "
        f"stderr={fmt(est.stderr_ratio)} threshold={fmt(verdict.threshold)} "
        f"margin={fmt(verdict.margin)}",
        file=out,
    )


def cmd_urn(args, out):
    try:
        urn = sampler.UrnSpec(args.black, args.white, args.mixed)
    except ValueError as exc:
        raise CLIError(str(exc)) from exc
    exact = sampler.urn_event_probs(urn).as_dict()
    for key, value in exact.items():
        print(f"{key} {fmt(value)}", file=out)
    if args.n is not None:
        if args.n < 1:
            raise CLIError("-n must be at least 1")
        est = sampler.sample_urn(urn, args.n, args.seed).as_dict()
        print(f"# estimates n={args.n} seed={args.seed} generator={sampler.GENERATOR}", file=out)
        for key, value in est.items():
            print(f"{key} {fmt(value)}", file=out)


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qdtree",
        description="Map quantum states to probabilistic decision trees.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("probs", help="print outcome probabilities of a state file")
    p.add_argument("statefile")
    p.set_defaults(func=cmd_probs)

    p = sub.add_parser("tree", help="reconstruct the exact decision tree of a state")
    p.add_argument("statefile")
    p.add_argument("--order", help="measurement order as a comma-separated qubit permutation")
    p.add_argument("--format", choices=("json", "dot"), default="json")
    p.set_defaults(func=cmd_tree)

    p = sub.add_parser("fit2", help="two-parameter constrained tree for a 2-qubit state")
    p.add_argument("statefile")
    p.add_argument("--measure", choices=[k.value for k in dtree.DivergenceKind], default="tv")
    p.set_defaults(func=cmd_fit2)

    p = sub.add_parser("factor", help="test whether a 2-qubit state is a product of its marginals")
    p.add_argument("statefile")
    p.add_argument("--tol", type=float, default=1e-6)
    p.set_defaults(func=cmd_factor)

    p = sub.add_parser("sample", help="sample outcomes from a state or tree file")
    p.add_argument("file")
    p.add_argument("-n", type=int, default=1000)
    p.add_argument("--seed", type=_seed, default=0)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("discriminate", help="classify a coincidence stream as classical or quantum")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--stream", help="JSON array of 3-bit strings")
    src.add_argument("--gen", type=float, metavar="P_S", help="generate a synthetic stream")
    p.add_argument("-n", type=int, default=10000)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--write-stream", metavar="FILE", help="also write the stream as JSON")
    p.set_defaults(func=cmd_discriminate)

    p = sub.add_parser("urn", help="event probabilities of a black/white/mixed urn")
    p.add_argument("--black", type=int, required=True)
    p.add_argument("--white", type=int, required=True)
    p.add_argument("--mixed", type=int, required=True)
    p.add_argument("-n", type=int, default=None, help="also estimate from n seeded draws")
    p.add_argument("--seed", type=_seed, default=0)
    p.set_defaults(func=cmd_urn)
    return parser


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.func(args, out)
    except CLIError as exc:
        print(f"error: {exc}", file=err)
        return exc.code
    except PermutationError as exc:
        print(f"error: bad permutation: {exc}", file=err)
        return EXIT_PERM
    except QubitCountError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_QUBITS
    except (InvariantError, ValueError, TypeError, KeyError) as exc:
        print(f"error: invariant violated: {exc}", file=err)
        return EXIT_INPUT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
