"""Monotone span programs and their constructions.

An MSP is a field, a d x e matrix with full column rank, and a
labeling of each row by a player. A player set accepts when the
target vector (1, 0, ..., 0) lies in the span of its rows; by the
kernel/image duality this is equivalent to the absence of a kernel
witness, and ``msp_eval`` always computes both criteria and insists
they agree.

Constructions here: the Shamir/Vandermonde instance, compilation of
monotone threshold formulas (or: stack sharing the secret column;
and: additive secret split across fresh columns; threshold: a
Vandermonde block composed by row insertion), a generic dualizer, and
the one-extra-player self-dual extension.
"""

from __future__ import annotations

from dataclasses import dataclass

from .galois import Field, Matrix, rank, solve_left, kernel_witness
from .structures import (
    AdversaryStructure,
    And,
    Formula,
    Or,
    Var,
    complement,
    eval_formula,
    make_and,
    make_or,
    max_player,
    players_from_mask,
)

MAX_STRUCTURE_PLAYERS = 16


class MspFormatError(ValueError):
    """Raised for malformed MSP dump files."""


@dataclass(frozen=True)
class MSP:
    """Monotone span program (field, matrix, row labeling) over n players.

    ``psi[i]`` is the 1-based player owning row i. Column 0 is the
    secret coordinate; full column rank is enforced at construction
    (silently dropping dependent columns would move the secret
    coordinate, and the quantum encoding needs an invertible
    extension).
    """

    field: Field
    matrix: Matrix
    psi: tuple[int, ...]
    n: int

    def __post_init__(self) -> None:
        if self.matrix.cols < 1:
            raise ValueError("an MSP needs at least one column")
        if len(self.psi) != self.matrix.rows:
            raise ValueError("row labeling length does not match the matrix")
        if self.n < 1:
            raise ValueError("player count must be positive")
        if any(not 1 <= lbl <= self.n for lbl in self.psi):
            raise ValueError("row label out of range")
        if rank(self.matrix) != self.matrix.cols:
            raise ValueError("MSP matrix lacks full column rank")

    @classmethod
    def _unchecked(cls, field: Field, matrix: Matrix, psi: tuple[int, ...], n: int) -> "MSP":
        """Bypass validation; only for tests that need a broken MSP."""
        obj = object.__new__(cls)
        object.__setattr__(obj, "field", field)
        object.__setattr__(obj, "matrix", matrix)
        object.__setattr__(obj, "psi", psi)
        object.__setattr__(obj, "n", n)
        return obj

    @property
    def d(self) -> int:
        return self.matrix.rows

    @property
    def e(self) -> int:
        return self.matrix.cols

    @property
    def eps(self) -> tuple[int, ...]:
        return (1,) + (0,) * (self.e - 1)

    def row_indices(self, mask: int) -> tuple[int, ...]:
        """Indices of rows labeled into the given player set, in row order."""
        return tuple(i for i, lbl in enumerate(self.psi) if mask >> (lbl - 1) & 1)


def rows_of(msp: MSP, mask: int) -> Matrix:
    """The submatrix M_B of rows owned by the player set, order preserved."""
    return msp.matrix.take_rows(msp.row_indices(mask))


def msp_eval(msp: MSP, mask: int) -> int:
    """The monotone function: 1 iff the target vector is spanned by M_B.

    Both the span criterion (a left solution exists) and its dual (a
    kernel witness not orthogonal to the target exists) are computed;
    exactly one must succeed, anything else indicates a linear-algebra
    bug and raises.
    """
    sub = rows_of(msp, mask)
    spanned = solve_left(sub, msp.eps) is not None
    witnessed = kernel_witness(sub, msp.eps) is not None
    if spanned == witnessed:
        raise RuntimeError(
            f"span and kernel criteria disagree on subset {mask:b}; "
            "the linear algebra layer is broken"
        )
    return 1 if spanned else 0


def msp_structure(msp: MSP) -> AdversaryStructure:
    """The adversary structure f^-1(0), by exhaustive enumeration."""
    if msp.n > MAX_STRUCTURE_PLAYERS:
        raise ValueError(f"structure enumeration capped at {MAX_STRUCTURE_PLAYERS} players")
    values = [msp_eval(msp, b) for b in range(1 << msp.n)]
    maximal = [
        b
        for b in range(1 << msp.n)
        if values[b] == 0
        and all(values[b | (1 << i)] == 1 for i in range(msp.n) if not b >> i & 1)
    ]
    return AdversaryStructure(msp.n, tuple(maximal))


def shamir_msp(n: int, k: int, field: Field) -> MSP:
    """The degree-k Shamir scheme as an n x (k+1) Vandermonde MSP.

    Row i is (1, x, x^2, ..., x^k) at x = i, so the evaluation points
    1..n must be distinct and nonzero mod p, i.e. p > n. The identity
    labeling gives the threshold-k adversary structure.
    """
    if not 0 <= k < n:
        raise ValueError(f"degree must satisfy 0 <= k < n, got k={k}, n={n}")
    if field.p <= n:
        raise ValueError(f"field GF({field.p}) too small for {n} evaluation points")
    rows = [[pow(x, j, field.p) for j in range(k + 1)] for x in range(1, n + 1)]
    return MSP(field, Matrix.from_rows(field, rows, k + 1), tuple(range(1, n + 1)), n)


# ---------------------------------------------------------------------------
# composition


def _var_msp(field: Field, player: int, n: int) -> MSP:
    return MSP(field, Matrix.from_rows(field, [(1,)], 1), (player,), n)


def _or_compose(field: Field, parts: list[MSP], n: int) -> MSP:
    """Stack the parts, sharing the secret column."""
    cols = 1 + sum(part.e - 1 for part in parts)
    rows: list[list[int]] = []
    psi: list[int] = []
    offset = 1
    for part in parts:
        for i in range(part.d):
            src = part.matrix.row(i)
            row = [src[0]] + [0] * (cols - 1)
            row[offset : offset + part.e - 1] = src[1:]
            rows.append(row)
            psi.append(part.psi[i])
        offset += part.e - 1
    return MSP(field, Matrix.from_rows(field, rows, cols), tuple(psi), n)


def _and_compose(field: Field, parts: list[MSP], n: int) -> MSP:
    """Split the secret additively: part i shares r_i, the last shares
    s - r_1 - ... - r_{k-1}, with the r_i on fresh columns."""
    k = len(parts)
    cols = k + sum(part.e - 1 for part in parts)
    rows: list[list[int]] = []
    psi: list[int] = []
    offset = k
    for i, part in enumerate(parts):
        for r in range(part.d):
            src = part.matrix.row(r)
            a = src[0]
            row = [0] * cols
            if i < k - 1:
                row[1 + i] = a
            else:
                row[0] = a
                for j in range(1, k):
                    row[j] = (-a) % field.p
            row[offset : offset + part.e - 1] = src[1:]
            rows.append(row)
            psi.append(part.psi[r])
        offset += part.e - 1
    return MSP(field, Matrix.from_rows(field, rows, cols), tuple(psi), n)


def _threshold_compose(field: Field, k: int, parts: list[MSP], n: int) -> MSP:
    """Insert each part into one row of an arity x k Vandermonde block."""
    arity = len(parts)
    if field.p <= arity:
        raise ValueError(
            f"field GF({field.p}) too small for a threshold gate of arity {arity}"
        )
    cols = k + sum(part.e - 1 for part in parts)
    rows: list[list[int]] = []
    psi: list[int] = []
    offset = k
    for i, part in enumerate(parts):
        point = [pow(i + 1, j, field.p) for j in range(k)]
        for r in range(part.d):
            src = part.matrix.row(r)
            a = src[0]
            row = [(a * point[j]) % field.p for j in range(k)] + [0] * (cols - k)
            row[offset : offset + part.e - 1] = src[1:]
            rows.append(row)
            psi.append(part.psi[r])
        offset += part.e - 1
    return MSP(field, Matrix.from_rows(field, rows, cols), tuple(psi), n)


_VERIFY_LIMIT = 12


def _compile(f: Formula, field: Field, n: int) -> MSP:
    if isinstance(f, Var):
        return _var_msp(field, f.player, n)
    parts = [_compile(c, field, n) for c in f.children]
    if isinstance(f, Or):
        return _or_compose(field, parts, n)
    if isinstance(f, And):
        return _and_compose(field, parts, n)
    return _threshold_compose(field, f.k, parts, n)


def compile_formula(f: Formula, field: Field, n: int | None = None) -> MSP:
    """Compile a monotone threshold formula into an MSP computing it.

    For n <= 12 the builder verifies its own output against
    eval_formula on every subset before returning it.
    """
    needed = max_player(f)
    if n is None:
        n = needed
    if n < needed:
        raise ValueError(f"formula references player {needed} but n={n}")
    out = _compile(f, field, n)
    if n <= _VERIFY_LIMIT:
        for b in range(1 << n):
            if msp_eval(out, b) != eval_formula(f, b):
                raise RuntimeError(f"compiled MSP disagrees with formula on {b:b}")
    return out


def dual_msp(msp: MSP) -> MSP:
    """An MSP computing the dual function f*.

    Generic construction: the minimal qualified sets of the dual
    structure are exactly the complements of the maximal sets of this
    MSP's structure, so compile their or-of-ands formula. Correct but
    not size-preserving; a size-optimal dualizer can be swapped in
    here without changing any caller.
    """
    structure = msp_structure(msp)
    dual_structure = structure.dual()
    min_qualified = sorted(complement(m, msp.n) for m in structure.maximal)
    conjuncts = [
        make_and([Var(i) for i in players_from_mask(mq)]) for mq in min_qualified
    ]
    out = compile_formula(make_or(conjuncts), msp.field, msp.n)
    if msp.n <= _VERIFY_LIMIT and msp_structure(out) != dual_structure:
        raise RuntimeError("dual MSP does not compute the dual structure")
    return out


def extend_msp(msp: MSP, dualizer=dual_msp) -> MSP:
    """An MSP for the self-dual extension of this MSP's structure.

    Player n+1 plays the extra role; the program computes
    f or (f* and f_tau) via the or/and compositions. Requires the
    structure to be Q2* (otherwise no quantum scheme exists at all).

    ``dualizer`` builds the f* component; the default is the generic
    one, and a size-preserving dualizer can be passed in to keep the
    extension within a constant factor of the input.
    """
    structure = msp_structure(msp)
    if not structure.is_q2star():
        raise ValueError("structure is not Q2*; no-cloning forbids QSS")
    n2 = msp.n + 1
    base = MSP(msp.field, msp.matrix, msp.psi, n2)
    dual_part = dualizer(msp)
    dual_lifted = MSP(msp.field, dual_part.matrix, dual_part.psi, n2)
    tau = _var_msp(msp.field, n2, n2)
    out = _or_compose(
        msp.field, [base, _and_compose(msp.field, [dual_lifted, tau], n2)], n2
    )
    expected = structure.extend_selfdual()
    if msp_structure(out) != expected:
        raise RuntimeError("extended MSP does not compute the extended structure")
    return out


# ---------------------------------------------------------------------------
# dump format


def dump_msp(msp: MSP) -> str:
    """Serialize: header line, then one ``row <player> <entries>`` per row."""
    lines = [f"msp field={msp.field.p} d={msp.d} e={msp.e} n={msp.n}"]
    for i in range(msp.d):
        entries = " ".join(str(x) for x in msp.matrix.row(i))
        lines.append(f"row {msp.psi[i]} {entries}")
    return "\n".join(lines) + "\n"


def parse_msp(text: str) -> MSP:
    lines = [ln for ln in (raw.strip() for raw in text.splitlines()) if ln and not ln.startswith("#")]
    if not lines or not lines[0].startswith("msp "):
        raise MspFormatError("missing msp header line")
    header: dict[str, int] = {}
    for token in lines[0].split()[1:]:
        key, _, value = token.partition("=")
        if not value.isdigit():
            raise MspFormatError(f"bad header token {token!r}")
        header[key] = int(value)
    for key in ("field", "d", "e", "n"):
        if key not in header:
            raise MspFormatError(f"header missing {key}")
    try:
        field = Field(header["field"])
    except ValueError as exc:
        raise MspFormatError(str(exc)) from None
    rows: list[list[int]] = []
    psi: list[int] = []
    for ln in lines[1:]:
        parts = ln.split()
        if parts[0] != "row":
            raise MspFormatError(f"unexpected line {ln!r}")
        if len(parts) != 2 + header["e"]:
            raise MspFormatError(f"row with {len(parts) - 2} entries, expected {header['e']}")
        try:
            psi.append(int(parts[1]))
            rows.append([int(x) for x in parts[2:]])
        except ValueError:
            raise MspFormatError(f"non-integer entry in {ln!r}") from None
    if len(rows) != header["d"]:
        raise MspFormatError(f"{len(rows)} rows, header says {header['d']}")
    try:
        return MSP(field, Matrix.from_rows(field, rows, header["e"]), tuple(psi), header["n"])
    except ValueError as exc:
        raise MspFormatError(str(exc)) from None
