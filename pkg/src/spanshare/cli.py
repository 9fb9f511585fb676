"""The ``spanshare`` command-line front end.

Subcommands map one-to-one onto the library layers: ``structure``
(predicates, dual, self-dual extension), ``msp`` (compile, dualize,
extend, evaluate), ``share``/``reconstruct`` (classical dealing),
``qss`` (pure/mixed quantum verification sweeps) and ``condition``
(the square-root criterion, its oracle, and the counterexample
search).

Exit codes: 0 all checks passed, 1 a check failed, 2 usage or file
format error. Dealing randomness comes from SplitMix64 (frozen here,
seeded via --seed, recorded in every output) so share files and
reports are byte-reproducible.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .classical import (
    ReconstructionError,
    ShareFormatError,
    format_share_file,
    parse_share_file,
    reconstruct,
    share,
)
from .condition import (
    PreconditionError,
    SchemeFormatError,
    check_correctness,
    eq1_check,
    format_scheme,
    lift_report,
    parse_scheme,
    search_counterexample,
)
from .msp import (
    MspFormatError,
    compile_formula,
    dual_msp,
    dump_msp,
    extend_msp,
    msp_eval,
    parse_msp,
)
from .quantum import probe_family, qss_mixed, qss_pure
from .structures import (
    FormulaError,
    StructureFormatError,
    format_structure,
    full_mask,
    mask_from_players,
    parse_formula,
    parse_structure,
)

_FORMAT_ERRORS = (
    StructureFormatError,
    MspFormatError,
    ShareFormatError,
    SchemeFormatError,
    FormulaError,
)


class SplitMix64:
    """Frozen 64-bit generator for reproducible dealing randomness.

    The algorithm is pinned here (not delegated to a library) because
    share files are golden-tested: state advances by 0x9E3779B97F4A7C15
    and the output mix is the standard SplitMix64 finalizer. Field
    elements are taken as next() mod p.
    """

    MASK = (1 << 64) - 1

    def __init__(self, seed: int):
        self.state = seed & self.MASK

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & self.MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & self.MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & self.MASK
        return z ^ (z >> 31)

    def elements(self, p: int, count: int) -> tuple[int, ...]:
        return tuple(self.next_u64() % p for _ in range(count))


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise SchemeFormatError(f"cannot read {path}: {exc.strerror}") from None


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        print(text, end="" if text.endswith("\n") else "\n")


def _parse_set(text: str, n: int) -> int:
    if text in ("-", ""):
        return 0
    try:
        ids = [int(x) for x in text.split(",")]
    except ValueError:
        raise ValueError(f"--set must be comma-separated player ids, got {text!r}") from None
    return mask_from_players(ids, n)


# ---------------------------------------------------------------------------
# structure


def _cmd_structure_check(args: argparse.Namespace) -> int:
    structure = parse_structure(_read(args.file))
    verdicts = {
        "q2": structure.is_q2(),
        "q2star": structure.is_q2star(),
        "selfdual": structure.is_selfdual(),
    }
    print(" ".join(f"{k}={'true' if v else 'false'}" for k, v in verdicts.items()))
    if args.require:
        if not verdicts[args.require]:
            print(f"required predicate {args.require} does not hold", file=sys.stderr)
            return 1
    return 0


def _cmd_structure_dual(args: argparse.Namespace) -> int:
    structure = parse_structure(_read(args.file))
    _emit(format_structure(structure.dual()), args.out)
    return 0


def _cmd_structure_extend(args: argparse.Namespace) -> int:
    structure = parse_structure(_read(args.file))
    try:
        extended = structure.extend_selfdual()
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    _emit(format_structure(extended), args.out)
    return 0


# ---------------------------------------------------------------------------
# msp


def _cmd_msp_from_formula(args: argparse.Namespace) -> int:
    formula = parse_formula(args.formula)
    from .galois import Field

    msp = compile_formula(formula, Field(args.field), n=args.players)
    _emit(dump_msp(msp), args.out)
    return 0


def _cmd_msp_dual(args: argparse.Namespace) -> int:
    msp = parse_msp(_read(args.file))
    _emit(dump_msp(dual_msp(msp)), args.out)
    return 0


def _cmd_msp_extend(args: argparse.Namespace) -> int:
    msp = parse_msp(_read(args.file))
    try:
        extended = extend_msp(msp)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    _emit(dump_msp(extended), args.out)
    return 0


def _cmd_msp_eval(args: argparse.Namespace) -> int:
    msp = parse_msp(_read(args.file))
    print(msp_eval(msp, _parse_set(args.set, msp.n)))
    return 0


# ---------------------------------------------------------------------------
# classical dealing


def _cmd_share(args: argparse.Namespace) -> int:
    msp = parse_msp(_read(args.msp))
    randomness = SplitMix64(args.seed).elements(msp.field.p, msp.e - 1)
    sv = share(msp, args.secret, randomness)
    _emit(format_share_file(sv, comment=f"seed {args.seed}"), args.out)
    return 0


def _cmd_reconstruct(args: argparse.Namespace) -> int:
    msp = parse_msp(_read(args.msp))
    p, entries = parse_share_file(_read(args.shares))
    if p != msp.field.p:
        raise ShareFormatError(f"share file field {p} does not match MSP field {msp.field.p}")
    q = _parse_set(args.set, msp.n)
    wanted = msp.row_indices(q)
    missing = [i + 1 for i in wanted if i not in entries]
    if missing:
        raise ShareFormatError(f"share file lacks rows {missing} needed by the set")
    try:
        secret = reconstruct(msp, q, {i: entries[i][1] for i in wanted})
    except ReconstructionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(secret)
    return 0


# ---------------------------------------------------------------------------
# quantum verification


def _print_report(report, fmt: str) -> int:
    print(report.to_machine() if fmt == "machine" else report.to_text(), end="")
    if not report.applicable:
        return 1
    return 0 if report.passed else 1


def _cmd_qss_verify_pure(args: argparse.Namespace) -> int:
    msp = parse_msp(_read(args.file))
    try:
        scheme = qss_pure(msp)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        print("hint: use verify-mixed", file=sys.stderr)
        return 1
    family = probe_family(msp.field.p, seed=args.seed, n_random=args.random)
    return _print_report(scheme.verify_all(inputs=family, seed=args.seed), args.format)


def _cmd_qss_verify_mixed(args: argparse.Namespace) -> int:
    msp = parse_msp(_read(args.file))
    try:
        scheme = qss_mixed(msp)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    family = probe_family(msp.field.p, seed=args.seed, n_random=args.random)
    return _print_report(scheme.verify_all(inputs=family, seed=args.seed), args.format)


# ---------------------------------------------------------------------------
# conversion condition


def _cmd_condition_check(args: argparse.Namespace) -> int:
    scheme = parse_scheme(_read(args.file))
    if not check_correctness(scheme, full_mask(scheme.n)):
        print("error: not a valid secret-sharing table", file=sys.stderr)
        return 2
    u = _parse_set(args.set, scheme.n)
    try:
        eq1 = eq1_check(scheme, u)
        oracle = lift_report(scheme, u, seed=args.seed)
    except PreconditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    agree = eq1 == oracle.passed
    print(
        f"eq1={'true' if eq1 else 'false'} "
        f"oracle={'true' if oracle.passed else 'false'} "
        f"agree={'true' if agree else 'false'}"
    )
    if not agree:
        print("error: criterion and oracle disagree; please report this", file=sys.stderr)
        return 1
    return 0 if eq1 else 1


def _cmd_condition_search(args: argparse.Namespace) -> int:
    found = search_counterexample(
        max_secrets=args.secrets,
        max_share_size=args.share_size,
        max_denominator=args.den,
        family=args.family,
    )
    if found is None:
        print("no counterexample within the given bounds")
        return 1
    certificate = lift_report(found, 0b01, seed=args.seed)
    _emit(format_scheme(found), args.out)
    print(
        f"counterexample found: eq1=false oracle=false "
        f"max_distance={certificate.max_distance:.6f} "
        f"witness={certificate.witness[0]}|{certificate.witness[1]} seed={args.seed}"
    )
    return 0


# ---------------------------------------------------------------------------
# parser


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spanshare",
        description="secret sharing from monotone span programs, classical and quantum",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_structure = sub.add_parser("structure", help="adversary structure operations")
    s_sub = p_structure.add_subparsers(dest="subcommand", required=True)
    p = s_sub.add_parser("check", help="print Q2/Q2*/self-dual verdicts")
    p.add_argument("file")
    p.add_argument("--require", choices=["q2", "q2star", "selfdual"])
    p.set_defaults(handler=_cmd_structure_check)
    p = s_sub.add_parser("dual", help="compute the dual structure")
    p.add_argument("file")
    p.add_argument("--out")
    p.set_defaults(handler=_cmd_structure_dual)
    p = s_sub.add_parser("extend", help="one-extra-player self-dual extension")
    p.add_argument("file")
    p.add_argument("--out")
    p.set_defaults(handler=_cmd_structure_extend)

    p_msp = sub.add_parser("msp", help="monotone span program operations")
    m_sub = p_msp.add_subparsers(dest="subcommand", required=True)
    p = m_sub.add_parser("from-formula", help="compile a monotone threshold formula")
    p.add_argument("formula")
    p.add_argument("--field", type=int, required=True)
    p.add_argument("--players", type=int)
    p.add_argument("--out")
    p.set_defaults(handler=_cmd_msp_from_formula)
    p = m_sub.add_parser("dual", help="MSP for the dual structure")
    p.add_argument("file")
    p.add_argument("--out")
    p.set_defaults(handler=_cmd_msp_dual)
    p = m_sub.add_parser("extend", help="MSP for the self-dual extension")
    p.add_argument("file")
    p.add_argument("--out")
    p.set_defaults(handler=_cmd_msp_extend)
    p = m_sub.add_parser("eval", help="evaluate f(B) for a player set")
    p.add_argument("file")
    p.add_argument("--set", required=True)
    p.set_defaults(handler=_cmd_msp_eval)

    p = sub.add_parser("share", help="deal a secret with seeded randomness")
    p.add_argument("msp")
    p.add_argument("--secret", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(handler=_cmd_share)

    p = sub.add_parser("reconstruct", help="recover a secret from a share file")
    p.add_argument("msp")
    p.add_argument("shares")
    p.add_argument("--set", required=True)
    p.set_defaults(handler=_cmd_reconstruct)

    p_qss = sub.add_parser("qss", help="quantum scheme verification")
    q_sub = p_qss.add_subparsers(dest="subcommand", required=True)
    for name, handler in [("verify-pure", _cmd_qss_verify_pure), ("verify-mixed", _cmd_qss_verify_mixed)]:
        p = q_sub.add_parser(name)
        p.add_argument("file")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--random", type=int, default=20, help="random probe states")
        p.add_argument("--format", choices=["text", "machine"], default="text")
        p.set_defaults(handler=handler)

    p_cond = sub.add_parser("condition", help="classical-to-quantum conversion condition")
    c_sub = p_cond.add_subparsers(dest="subcommand", required=True)
    p = c_sub.add_parser("check", help="run eq1 and the oracle on a scheme file")
    p.add_argument("file")
    p.add_argument("--set", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(handler=_cmd_condition_check)
    p = c_sub.add_parser("search", help="search for a scheme failing the condition")
    p.add_argument("--secrets", type=int, default=2)
    p.add_argument("--share-size", type=int, default=3)
    p.add_argument("--den", type=int, default=8)
    p.add_argument("--family", choices=["all", "function", "homomorphic"], default="all")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(handler=_cmd_condition_search)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except _FORMAT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
