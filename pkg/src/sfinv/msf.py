"""The universal strongly F-inverse quotient and its two presentations.

Two congruences on the enumerated expansion are built and compared:

* the coterminal-path congruence, generated by identifying all simple-path
  spans with a common endpoint, whose quotient is the universal strongly
  F-inverse monoid over the group;
* the cycle-split congruence, generated by ``(span(u), [u]) ~
  (span(v^-1), [v^-1])`` over all splits ``uv`` of cyclic words.

The closure model realizes the same quotient concretely: elements are pairs
(cyclic compact subgraph, point) multiplied by plain union, which needs no
closure because a union of cyclic subgraphs is cyclic.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import NamedTuple

from . import cayley
from .errors import BudgetError
from .expansion import (
    DEFAULT_SLOT_BUDGET,
    DEFAULT_TABLE_CAP,
    Congruence,
    FiniteInverseMonoid,
    MMElement,
    congruence_generated,
    connected_subgraph_masks,
    element_key,
    mm_inverse,
    mm_multiply,
)
from .groups import FiniteGroup
from .words import Letter, Word, invert, splits

MsfElement = MMElement  # same shape; the graph component is additionally cyclic


class SplitSearch(NamedTuple):
    pairs: tuple[tuple[Word, Word], ...]
    truncated: bool


def msf_generator(G: FiniteGroup, letter: Letter) -> MsfElement:
    word = (letter,)
    return MsfElement(
        cayley.cyclic_closure(G, cayley.span_of_word(G, word)), G.evaluate(word)
    )


def msf_evaluate_word(G: FiniteGroup, word: Word) -> MsfElement:
    return MsfElement(
        cayley.cyclic_closure(G, cayley.span_of_word(G, word)), G.evaluate(word)
    )


def msf_multiply(G: FiniteGroup, s: MsfElement, t: MsfElement) -> MsfElement:
    # No closure needed: a union of cyclic subgraphs is cyclic.
    out = MMElement(
        s.graph | cayley.translate(G, s.point, t.graph), G.mult(s.point, t.point)
    )
    assert cayley.is_cyclic_subgraph(G, out.graph) if __debug__ else True
    return out


def msf_inverse(G: FiniteGroup, s: MsfElement) -> MsfElement:
    return mm_inverse(G, s)


def enumerate_msf(
    G: FiniteGroup,
    slot_budget: int = DEFAULT_SLOT_BUDGET,
    table_cap: int = DEFAULT_TABLE_CAP,
) -> FiniteInverseMonoid:
    """All pairs (cyclic connected compact subgraph containing 1 and g, g)."""
    payloads = []
    for mask in connected_subgraph_masks(G, slot_budget):
        if not cayley.is_cyclic_subgraph(G, mask):
            continue
        if not cayley.is_connected(G, mask):
            continue
        for point in sorted(cayley.vertex_set(G, mask)):
            payloads.append(MsfElement(mask, point))
    gens = {l: msf_generator(G, l) for l in G.alphabet.signed_letters()}
    return FiniteInverseMonoid(
        G.alphabet,
        payloads,
        key_fn=lambda p: element_key(G, p),
        product_fn=lambda s, t: msf_multiply(G, s, t),
        inverse_fn=lambda s: msf_inverse(G, s),
        identity_payload=MsfElement(0, 0),
        generator_payloads=gens,
        table_cap=table_cap,
    )


def cycle_splits(
    G: FiniteGroup, cycle_budget: int = cayley.DEFAULT_CYCLE_BUDGET
) -> SplitSearch:
    """All pairs (u, v) of non-empty words whose product is a cyclic word.

    Enumerated from simple cycles based at the identity only; rotations show
    up as their own cycles, so word-level dedup is all that is needed.
    """
    found = cayley.simple_cycles_at_identity(G, cycle_budget)
    pairs: set[tuple[Word, Word]] = set()
    for w in found.words:
        if len(w) < 2:
            continue
        pairs.update(splits(w))
    ordered = sorted(pairs, key=lambda uv: (len(uv[0]) + len(uv[1]), uv))
    return SplitSearch(tuple(ordered), found.truncated)


def coterminal_path_congruence(
    M: FiniteInverseMonoid,
    G: FiniteGroup,
    path_budget: int = cayley.DEFAULT_CYCLE_BUDGET,
) -> Congruence:
    """Congruence identifying all simple-path spans with a common endpoint."""
    pairs: list[tuple[int, int]] = []
    for g in range(G.order):
        found = cayley.simple_paths(G, g, path_budget)
        if found.truncated:
            raise BudgetError("simple-path enumeration truncated")
        indices = [
            M.index_of(MMElement(cayley.span_of_word(G, w), g)) for w in found.words
        ]
        first = indices[0]
        pairs.extend((first, other) for other in indices[1:])
    return congruence_generated(M, pairs)


def cycle_split_congruence(
    M: FiniteInverseMonoid,
    G: FiniteGroup,
    cycle_budget: int = cayley.DEFAULT_CYCLE_BUDGET,
) -> Congruence:
    """Congruence generated by (span(u),[u]) ~ (span(v^-1),[v^-1]) over splits."""
    found = cycle_splits(G, cycle_budget)
    if found.truncated:
        raise BudgetError("cycle enumeration truncated")
    pairs = []
    for u, v in found.pairs:
        vin = invert(v)
        a = M.index_of(MMElement(cayley.span_of_word(G, u), G.evaluate(u)))
        b = M.index_of(MMElement(cayley.span_of_word(G, vin), G.evaluate(vin)))
        pairs.append((a, b))
    return congruence_generated(M, pairs)


@dataclass(frozen=True)
class VerifyReport:
    ok: bool | None
    expansion_size: int
    quotient_size: int | None
    model_size: int | None
    detail: str | None = None


def verify_split_presentation(
    G: FiniteGroup,
    slot_budget: int = DEFAULT_SLOT_BUDGET,
    cycle_budget: int = cayley.DEFAULT_CYCLE_BUDGET,
    table_cap: int = DEFAULT_TABLE_CAP,
    expansion: FiniteInverseMonoid | None = None,
) -> VerifyReport:
    """Check that the two congruences define the same partition, exactly."""
    try:
        M = expansion if expansion is not None else _enumerate(G, slot_budget, table_cap)
        paths = coterminal_path_congruence(M, G, cycle_budget)
        splits_cong = cycle_split_congruence(M, G, cycle_budget)
    except BudgetError as exc:
        return VerifyReport(None, 0, None, None, detail=str(exc))
    mismatch = paths.first_difference(splits_cong)
    ok = mismatch is None
    detail = None if ok else f"first mismatch at element {mismatch} ({M.keys[mismatch]})"
    return VerifyReport(ok, M.size, paths.num_classes, None, detail)


def verify_closure_model(
    G: FiniteGroup,
    slot_budget: int = DEFAULT_SLOT_BUDGET,
    cycle_budget: int = cayley.DEFAULT_CYCLE_BUDGET,
    table_cap: int = DEFAULT_TABLE_CAP,
    expansion: FiniteInverseMonoid | None = None,
) -> VerifyReport:
    """Check the closure map is an isomorphism from the quotient expansion.

    The map sends the class of (graph, g) to (closure(graph), g).  Checked:
    constant on classes, injective across classes, onto the enumerated model,
    multiplicative on all pairs of class representatives, and matching on
    generator images.
    """
    try:
        M = expansion if expansion is not None else _enumerate(G, slot_budget, table_cap)
        paths = coterminal_path_congruence(M, G, cycle_budget)
        model = enumerate_msf(G, slot_budget, table_cap)
    except BudgetError as exc:
        return VerifyReport(None, 0, None, None, detail=str(exc))

    def close(el: MMElement) -> MsfElement:
        return MsfElement(cayley.cyclic_closure(G, el.graph, cycle_budget), el.point)

    target: dict[int, MsfElement] = {}
    for i, payload in enumerate(M.elements):
        root = paths.roots[i]
        image = close(payload)
        if root in target:
            if target[root] != image:
                return VerifyReport(
                    False, M.size, paths.num_classes, model.size,
                    detail=f"closure map not constant on the class of {M.keys[root]}",
                )
        else:
            target[root] = image
    images = set(target.values())
    if len(images) != len(target):
        return VerifyReport(
            False, M.size, paths.num_classes, model.size, detail="closure map not injective"
        )
    if images != set(model.elements):
        return VerifyReport(
            False, M.size, paths.num_classes, model.size,
            detail="closure map image differs from the enumerated model",
        )
    roots = sorted(target)
    for r1, r2 in itertools.product(roots, repeat=2):
        lhs = close(mm_multiply(G, M.elements[r1], M.elements[r2]))
        rhs = msf_multiply(G, target[r1], target[r2])
        if lhs != rhs:
            return VerifyReport(
                False, M.size, paths.num_classes, model.size,
                detail=f"not multiplicative at ({M.keys[r1]}, {M.keys[r2]})",
            )
    for letter, idx in M.gen_images.items():
        if target[paths.roots[idx]] != model.elements[model.gen_images[letter]]:
            return VerifyReport(
                False, M.size, paths.num_classes, model.size,
                detail="generator images do not correspond",
            )
    return VerifyReport(True, M.size, paths.num_classes, model.size)


def _enumerate(G: FiniteGroup, slot_budget: int, table_cap: int) -> FiniteInverseMonoid:
    from .expansion import enumerate_mm

    return enumerate_mm(G, slot_budget, table_cap)
