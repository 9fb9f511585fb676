"""MSP-based classical secret sharing.

Dealing multiplies the matrix by (s, a_2, ..., a_e); reconstruction by
a qualified set Q is the left solution u1 with u1^T M_Q = eps^T applied
to Q's shares. For an erased set B with qualified complement A, a
reconstruction plan packages the invertible share-space transformation
U whose first row extracts the secret and whose remaining rows span
the subspace orthogonal to M_A v for a kernel witness v of M_B; the
plan depends only on the MSP and B, never on dealt values.

Randomness is always an explicit argument so exhaustive sweeps and
golden tests control it fully; seeded generation lives in the CLI.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field as dc_field
from typing import Mapping, Sequence

from .galois import Matrix, kernel_basis, kernel_witness, rank, solve_left
from .msp import MSP, msp_eval, msp_structure, rows_of
from .structures import AdversaryStructure, complement, format_players


class ReconstructionError(ValueError):
    """A player set that cannot reconstruct was asked to."""


class ShareFormatError(ValueError):
    """Raised for malformed share files."""


@dataclass(frozen=True)
class ShareVector:
    """All d dealt share components, labeled through the MSP's psi."""

    msp: MSP
    entries: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.entries) != self.msp.d:
            raise ValueError("share vector length does not match the MSP")

    def for_player(self, player: int) -> tuple[tuple[int, int], ...]:
        """(row index, value) pairs owned by one player."""
        return tuple((i, self.entries[i]) for i, lbl in enumerate(self.msp.psi) if lbl == player)

    def for_set(self, mask: int) -> dict[int, int]:
        """row index -> value for every row owned by the player set."""
        return {i: self.entries[i] for i in self.msp.row_indices(mask)}


def share(msp: MSP, secret: int, randomness: Sequence[int]) -> ShareVector:
    """Deal: extend the secret by the given e-1 field elements and
    multiply by the MSP matrix."""
    if len(randomness) != msp.e - 1:
        raise ValueError(f"need {msp.e - 1} random elements, got {len(randomness)}")
    vec = (secret % msp.field.p,) + tuple(a % msp.field.p for a in randomness)
    return ShareVector(msp, msp.matrix.matvec(vec))


def reconstruct(msp: MSP, q_mask: int, shares_q: Mapping[int, int]) -> int:
    """Recover the secret from the shares of a qualified set.

    ``shares_q`` must cover exactly the rows labeled into the set. No
    consistency checking is performed: inconsistent inputs yield an
    unflagged field element.
    """
    indices = msp.row_indices(q_mask)
    if set(shares_q) != set(indices):
        missing = sorted(set(indices) - set(shares_q))
        extra = sorted(set(shares_q) - set(indices))
        raise ValueError(f"share rows mismatch (missing {missing}, unexpected {extra})")
    sub = rows_of(msp, q_mask)
    u1 = solve_left(sub, msp.eps)
    if u1 is None:
        raise ReconstructionError("set cannot reconstruct")
    values = [shares_q[i] for i in indices]
    return sum(c * v for c, v in zip(u1, values)) % msp.field.p


@dataclass(frozen=True)
class ReconstructionPlan:
    """The invertible transformation U on the shares of A = P - B.

    After applying U, the first A-share carries the secret and the
    joint distribution of everything else is independent of it. Rows
    after the first are the reduced echelon basis of
    W = {u : u . (M_A v) = 0}.
    """

    msp: MSP
    b: int
    a_rows: tuple[int, ...]
    u: Matrix
    u1: tuple[int, ...]
    v: tuple[int, ...]

    @property
    def m(self) -> int:
        return len(self.a_rows)


def build_reconstruction_plan(msp: MSP, b_mask: int) -> ReconstructionPlan:
    """Construct the share transformation for an erased set B.

    Requires B to be tolerable (f(B) = 0) with a qualified complement
    (f(P-B) = 1), i.e. B is in the intersection of the structure and
    its dual.
    """
    a_mask = complement(b_mask, msp.n)
    if msp_eval(msp, b_mask) != 0:
        raise ValueError(
            f"set {{{format_players(b_mask)}}} is qualified, not in the adversary structure"
        )
    if msp_eval(msp, a_mask) != 1:
        raise ValueError(
            f"complement {{{format_players(a_mask)}}} cannot reconstruct; "
            "erased set is not in the dual structure"
        )
    m_a = rows_of(msp, a_mask)
    m_b = rows_of(msp, b_mask)
    u1 = solve_left(m_a, msp.eps)
    v = kernel_witness(m_b, msp.eps)
    assert u1 is not None and v is not None  # guaranteed by the two checks above
    w = m_a.matvec(v)
    basis = kernel_basis(Matrix(msp.field, (w,), len(w)))
    assert msp.field.dot(u1, w) != 0  # u1 lies outside the secrecy subspace
    u = Matrix.from_rows(msp.field, [u1] + [list(r) for r in basis.data], len(w))
    if rank(u) != u.rows or u.rows != u.cols:
        raise RuntimeError("reconstruction plan transformation is not invertible")
    return ReconstructionPlan(msp, b_mask, msp.row_indices(a_mask), u, u1, v)


@dataclass
class ClassicalVerifyReport:
    """Outcome of the exhaustive dealing sweep."""

    msp: MSP
    deals: int
    passed: bool = True
    failures: list[str] = dc_field(default_factory=list)

    def record(self, message: str) -> None:
        self.passed = False
        self.failures.append(message)

    def __str__(self) -> str:
        status = "pass" if self.passed else "fail"
        lines = [f"classical verification: {status} ({self.deals} deals)"]
        lines += [f"  counterexample: {f}" for f in self.failures[:5]]
        return "\n".join(lines)


ENUMERATION_GUARD = 10**7


def verify_classical(
    msp: MSP, structure: AdversaryStructure | None = None, guard: int = ENUMERATION_GUARD
) -> ClassicalVerifyReport:
    """Deal every (secret, randomness) vector and check the scheme.

    (i) every qualified set of the structure reconstructs the dealt
    secret; (ii) for every tolerable set B, the multiset of B-share
    tuples over the randomness is identical for all secrets. The
    structure defaults to the MSP's own; passing a different one turns
    this into a check that the MSP actually tolerates it.
    """
    p = msp.field.p
    total = p**msp.e
    if total > guard:
        raise ValueError(
            f"{total} deals exceed the enumeration guard ({guard}); use a smaller field"
        )
    if structure is None:
        structure = msp_structure(msp)
    report = ClassicalVerifyReport(msp, deals=total)

    members = list(structure.members())
    qualified = [q for q in range(1 << msp.n) if q not in set(members)]
    recombinators: dict[int, tuple[tuple[int, ...] | None, tuple[int, ...]]] = {
        q: (solve_left(rows_of(msp, q), msp.eps), msp.row_indices(q)) for q in qualified
    }

    b_tuples: dict[int, dict[int, Counter]] = {b: {} for b in members}
    b_rows = {b: msp.row_indices(b) for b in members}

    for s in range(p):
        for a in itertools.product(range(p), repeat=msp.e - 1):
            dealt = msp.matrix.matvec((s,) + a)
            for q in qualified:
                u1, indices = recombinators[q]
                if u1 is None:
                    report.record(
                        f"qualified set {{{format_players(q)}}} cannot reconstruct at all"
                    )
                    return report
                got = sum(c * dealt[i] for c, i in zip(u1, indices)) % p
                if got != s:
                    report.record(
                        f"set {{{format_players(q)}}} reconstructed {got} for secret {s}, a={a}"
                    )
                    return report
            for b in members:
                view = tuple(dealt[i] for i in b_rows[b])
                b_tuples[b].setdefault(s, Counter())[view] += 1

    for b in members:
        counters = b_tuples[b]
        reference = counters.get(0, Counter())
        for s, counter in counters.items():
            if counter != reference:
                report.record(
                    f"B={{{format_players(b)}}} share distribution differs between secrets 0 and {s}"
                )
                return report
    return report


# ---------------------------------------------------------------------------
# share files


def format_share_file(sv: ShareVector, comment: str | None = None) -> str:
    """Serialize: ``field <p>`` header then ``share <player> <row> <value>``
    lines; rows are 1-based in the file."""
    lines = []
    if comment:
        lines.append(f"# {comment}")
    lines.append(f"field {sv.msp.field.p}")
    for i, value in enumerate(sv.entries):
        lines.append(f"share {sv.msp.psi[i]} {i + 1} {value}")
    return "\n".join(lines) + "\n"


def parse_share_file(text: str) -> tuple[int, dict[int, tuple[int, int]]]:
    """Parse to (field modulus, {0-based row: (player, value)})."""
    p: int | None = None
    shares: dict[int, tuple[int, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "field" and len(parts) == 2 and parts[1].isdigit():
            p = int(parts[1])
        elif parts[0] == "share" and len(parts) == 4:
            try:
                player, row, value = int(parts[1]), int(parts[2]), int(parts[3])
            except ValueError:
                raise ShareFormatError(f"line {lineno}: non-integer share entry") from None
            if row < 1:
                raise ShareFormatError(f"line {lineno}: rows are 1-based")
            if row - 1 in shares:
                raise ShareFormatError(f"line {lineno}: duplicate row {row}")
            shares[row - 1] = (player, value)
        else:
            raise ShareFormatError(f"line {lineno}: unrecognized line {line!r}")
    if p is None:
        raise ShareFormatError("missing field header")
    return p, shares
