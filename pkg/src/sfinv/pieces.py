"""Certified minimal-invertible-piece factorization and the strong
F-inverse verdict for one-relator special inverse monoids.

Piece boundaries are recovered from invertible-prefix positions: a prefix
cut position strictly inside a piece would hand that piece an invertible
proper prefix, contradicting minimality, so the boundary positions are
exactly the positions whose prefix is invertible.  Positive certificates
come from Stephen approximants, negative ones only from validated
partial-injection witnesses; the two sources firing together is an internal
soundness failure, never a verdict.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import pinj, stephen, words
from .errors import SoundnessError
from .stephen import DEFAULT_ROUNDS, DEFAULT_VERTEX_BUDGET, Presentation
from .words import Word, format_word, is_cyclically_reduced, is_dyck, reduce

STRONGLY_F_INVERSE = "strongly_f_inverse"
NOT_STRONGLY_F_INVERSE = "not_strongly_f_inverse"
UNKNOWN = "unknown"

INVERTIBLE = "invertible"
NOT_INVERTIBLE = "not_invertible"


@dataclass(frozen=True)
class PositionStatus:
    """Verdict for one proper prefix of the relator."""

    position: int
    status: str
    right_stage: int | None = None
    left_stage: int | None = None
    witness: str | None = None

    def to_json(self) -> dict:
        return {
            "position": self.position,
            "status": self.status,
            "right_stage": self.right_stage,
            "left_stage": self.left_stage,
            "witness": self.witness,
        }


@dataclass(frozen=True)
class PieceReport:
    relator: Word
    statuses: tuple[PositionStatus, ...]
    pieces: tuple[Word, ...] | None
    verdict: str
    reasons: tuple[str, ...]

    def to_json(self, alphabet) -> dict:
        return {
            "relator": format_word(self.relator, alphabet),
            "statuses": [s.to_json() for s in self.statuses],
            "pieces": None
            if self.pieces is None
            else [format_word(p, alphabet) for p in self.pieces],
            "verdict": self.verdict,
            "reasons": list(self.reasons),
        }


@dataclass(frozen=True)
class LinkReport:
    """Three-valued verdict of the adjacent-letter matching condition."""

    value: bool | None
    pair_results: tuple[tuple[int, str], ...]  # (index, "matched"/"mismatched"/"unknown")
    reasons: tuple[str, ...]

    def to_json(self, alphabet, relator: Word) -> dict:
        return {
            "relator": format_word(relator, alphabet),
            "linked": self.value,
            "pairs": [{"index": i, "result": r} for i, r in self.pair_results],
            "reasons": list(self.reasons),
        }


def _single_relator(presentation: Presentation) -> Word:
    if len(presentation.relators) != 1:
        raise ValueError("a single relator is required")
    return presentation.relators[0]


def _gather_witnesses(
    presentation: Presentation, witnesses: list[pinj.WitnessAssignment] | None
) -> list[pinj.WitnessAssignment]:
    out = pinj.builtin_witnesses(presentation)
    if witnesses:
        out = out + list(witnesses)
    return out


def classify_prefix(
    presentation: Presentation,
    j: int,
    rounds: int = DEFAULT_ROUNDS,
    vertex_budget: int = DEFAULT_VERTEX_BUDGET,
    witnesses: list[pinj.WitnessAssignment] | None = None,
) -> PositionStatus:
    """Decide whether the length-j proper prefix is invertible.

    Relator prefixes are always right invertible, so invertibility reduces
    to left invertibility; still, the positive side carries both Stephen
    certificates.  The negative side needs a validated witness.
    """
    relator = _single_relator(presentation)
    if not is_cyclically_reduced(relator):
        raise ValueError("relator must be cyclically reduced")
    if not 1 <= j <= len(relator) - 1:
        raise ValueError(f"position {j} out of range")
    prefix = relator[:j]
    positive = stephen.certify_invertible(presentation, prefix, rounds, vertex_budget)
    negative = None
    for witness in _gather_witnesses(presentation, witnesses):
        if pinj.certify_non_left_invertible(witness, prefix):
            negative = witness.name
            break
    if positive.certified and negative is not None:
        raise SoundnessError(
            f"prefix of length {j} certified invertible (Stephen) and "
            f"non-invertible (witness {negative!r})"
        )
    if positive.certified:
        return PositionStatus(
            j, INVERTIBLE,
            right_stage=positive.first.stage, left_stage=positive.second.stage,
        )
    if negative is not None:
        return PositionStatus(j, NOT_INVERTIBLE, witness=negative)
    return PositionStatus(j, UNKNOWN)


def factorize(
    presentation: Presentation,
    rounds: int = DEFAULT_ROUNDS,
    vertex_budget: int = DEFAULT_VERTEX_BUDGET,
    witnesses: list[pinj.WitnessAssignment] | None = None,
) -> PieceReport:
    """Cut the relator at every certified invertible-prefix position.

    Pieces are reported only when every position is decided.
    """
    relator = _single_relator(presentation)
    statuses = tuple(
        classify_prefix(presentation, j, rounds, vertex_budget, witnesses)
        for j in range(1, len(relator))
    )
    pieces: tuple[Word, ...] | None = None
    reasons = []
    if all(s.status != UNKNOWN for s in statuses):
        cuts = [0] + [s.position for s in statuses if s.status == INVERTIBLE] + [len(relator)]
        pieces = tuple(relator[a:b] for a, b in zip(cuts, cuts[1:]))
        reasons.append(f"all {len(statuses)} prefix positions decided")
    else:
        undecided = [s.position for s in statuses if s.status == UNKNOWN]
        reasons.append(f"undecided prefix positions: {undecided}")
    return PieceReport(relator, statuses, pieces, UNKNOWN, tuple(reasons))


def quick_verdicts(presentation: Presentation) -> PieceReport | None:
    """Syntactic sufficient conditions that settle the verdict outright.

    (i) one generator and the relator reduces to a power: cyclic group;
    (ii) Dyck relator: quotient of the free inverse monoid, always strongly
    F-inverse; (iii) every letter of the relator certified invertible at
    stage <= 2: the monoid is its own group of units.
    """
    relator = _single_relator(presentation)
    if len(presentation.alphabet) == 1:
        reduced = reduce(relator)
        if reduced:
            k = len(reduced)
            pieces = tuple((reduced[0],) for _ in range(k)) if reduced == relator else None
            return PieceReport(
                relator, (), pieces, STRONGLY_F_INVERSE,
                (f"single generator: the monoid is the cyclic group of order {k}",),
            )
    if is_dyck(relator):
        return PieceReport(
            relator, (), None, STRONGLY_F_INVERSE,
            ("Dyck relator: the monoid is a quotient of the free inverse monoid "
             "by relations already holding there",),
        )
    letters = sorted({l for l in relator}, key=words.letter_sort_key)
    certs = [stephen.certify_invertible(presentation, (l,), rounds=2) for l in letters]
    if all(c.certified for c in certs):
        pieces = tuple((l,) for l in relator)
        return PieceReport(
            relator, (), pieces, STRONGLY_F_INVERSE,
            ("every letter is invertible at stage <= 2: the monoid is a group",),
        )
    return None


def decide_strongly_f_inverse(
    presentation: Presentation,
    rounds: int = DEFAULT_ROUNDS,
    vertex_budget: int = DEFAULT_VERTEX_BUDGET,
    witnesses: list[pinj.WitnessAssignment] | None = None,
) -> PieceReport:
    """Full verdict for a one-relator special inverse monoid.

    Strongly F-inverse iff every certified piece has length at most two; a
    certified piece of length three or more refutes it.  Unknown positions
    leave the verdict unknown rather than guessed.
    """
    relator = _single_relator(presentation)
    quick = quick_verdicts(presentation)
    if quick is not None:
        return quick
    if not is_cyclically_reduced(relator):
        raise ValueError(
            "relator is not cyclically reduced; only Dyck relators are "
            "decidable on this path (via the free-inverse-monoid shortcut)"
        )
    report = factorize(presentation, rounds, vertex_budget, witnesses)
    statuses = report.statuses
    if report.pieces is not None:
        longest = max(len(p) for p in report.pieces)
        if longest <= 2:
            verdict = STRONGLY_F_INVERSE
            reason = f"fully certified factorization; longest piece has {longest} letters"
        else:
            verdict = NOT_STRONGLY_F_INVERSE
            reason = f"fully certified factorization; a piece has {longest} letters"
        return PieceReport(
            relator, statuses, report.pieces, verdict, report.reasons + (reason,)
        )
    # A certified long piece refutes even with other positions unknown.
    boundaries = [0] + [s.position for s in statuses if s.status == INVERTIBLE] + [len(relator)]
    by_pos = {s.position: s for s in statuses}
    for a, b in zip(boundaries, boundaries[1:]):
        if b - a >= 3 and all(
            by_pos[j].status == NOT_INVERTIBLE for j in range(a + 1, b)
        ):
            return PieceReport(
                relator, statuses, None, NOT_STRONGLY_F_INVERSE,
                report.reasons
                + (f"certified piece of length {b - a} between positions {a} and {b}",),
            )
    return PieceReport(relator, statuses, None, UNKNOWN, report.reasons)


def is_linked(
    presentation: Presentation,
    rounds: int = DEFAULT_ROUNDS,
    vertex_budget: int = DEFAULT_VERTEX_BUDGET,
    witnesses: list[pinj.WitnessAssignment] | None = None,
) -> LinkReport:
    """Check r(a_j) = d(a_{j+1}) for every adjacent letter pair.

    Positive certificates via Stephen equality of the two idempotent words,
    negative ones via a witness whose images have different range/domain
    idempotents; conjunction in three-valued logic.
    """
    relator = _single_relator(presentation)
    if not is_cyclically_reduced(relator):
        raise ValueError("relator must be cyclically reduced")
    all_witnesses = _gather_witnesses(presentation, witnesses)
    results = []
    reasons = []
    for i in range(len(relator) - 1)):
        pass
    pass
