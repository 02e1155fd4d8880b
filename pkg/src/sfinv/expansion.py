"""The Margolis-Meakin expansion and a generic finite inverse monoid toolkit.

An expansion element is a pair ``(graph, point)``: a finite connected
subgraph of the Cayley graph containing the identity and ``point``, with

    (D, g) . (X, h) = (D | g.X, g h)        (D, g)^-1 = (g^-1 D, g^-1)

Enumeration produces an explicit :class:`FiniteInverseMonoid` whose elements
are ordered by canonical serialization (sorted edge list plus point) so runs
are reproducible.  Congruences are union-find partitions closed under left
and right multiplication by generator images, which suffices because the
generators generate.
"""

from __future__ import annotations

import itertools
import random
import struct
from typing import Callable, Iterable, NamedTuple

from . import cayley
from .errors import BudgetError
from .groups import FiniteGroup
from .words import Letter, Word

DEFAULT_SLOT_BUDGET = 24
DEFAULT_TABLE_CAP = 400
DEFAULT_PATH_BUDGET = cayley.DEFAULT_CYCLE_BUDGET


class MMElement(NamedTuple):
    """A pointed subgraph; ``graph`` is an edge bitmask, ``point`` an element."""

    graph: int
    point: int


def mm_generator(G: FiniteGroup, letter: Letter) -> MMElement:
    word = (letter,)
    return MMElement(cayley.span_of_word(G, word), G.evaluate(word))


def mm_multiply(G: FiniteGroup, s: MMElement, t: MMElement) -> MMElement:
    return MMElement(
        s.graph | cayley.translate(G, s.point, t.graph), G.mult(s.point, t.point)
    )


def mm_inverse(G: FiniteGroup, s: MMElement) -> MMElement:
    inv = G.inverse(s.point)
    return MMElement(cayley.translate(G, inv, s.graph), inv)


def mm_evaluate_word(G: FiniteGroup, word: Word) -> MMElement:
    return MMElement(cayley.span_of_word(G, word), G.evaluate(word))


def mm_natural_leq(s: MMElement, t: MMElement) -> bool:
    """s <= t iff t's graph is contained in s's and the points agree."""
    return s.point == t.point and t.graph & ~s.graph == 0


def element_key(G: FiniteGroup, el: MMElement) -> str:
    return f"{cayley.subgraph_key(G, el.graph)}|{el.point}"


def connected_subgraph_masks(G: FiniteGroup, slot_budget: int = DEFAULT_SLOT_BUDGET) -> list[int]:
    """All connected edge masks containing the identity vertex, 0 included.

    Grown edge-by-edge from the empty mask: every connected mask has an
    edge ordering in which each prefix stays connected to the identity.
    """
    k = len(G.alphabet)
    slots = G.order * k
    if slots > slot_budget:
        raise BudgetError("expansion too large")
    seen = {0}
    queue = [0]
    while queue:
        mask = queue.pop()
        verts = cayley.vertex_set(G, mask)
        for s in range(slots):
            if mask >> s & 1:
                continue
            src, gen = divmod(s, k)
            if src in verts or G.gen_action[gen][src] in verts:
                new = mask | (1 << s)
                if new not in seen:
                    seen.add(new)
                    queue.append(new)
    return sorted(seen)


class FiniteInverseMonoid:
    """An explicit finite inverse monoid with canonically ordered elements.

    The full ``size x size`` multiplication table is materialized only up to
    ``table_cap``; beyond that, products are computed on demand from the
    element payloads while the per-generator multiplication tables (all the
    congruence machinery needs) are always built.
    """

    def __init__(
        self,
        alphabet,
        payloads: Iterable,
        key_fn: Callable,
        product_fn: Callable,
        inverse_fn: Callable,
        identity_payload,
        generator_payloads: dict[Letter, object],
        *,
        table_cap: int = DEFAULT_TABLE_CAP,
        check: bool = True,
    ):
        self.alphabet = alphabet
        order = sorted(payloads, key=key_fn)
        self.elements = tuple(order)
        self.keys = tuple(key_fn(p) for p in order)
        self.size = len(order)
        self._index = {p: i for i, p in enumerate(order)}
        self._product_fn = product_fn
        self.identity = self._index[identity_payload]
        self.gen_images = {
            letter: self._index[p] for letter, p in generator_payloads.items()
        }
        self.inverse = tuple(self._index[inverse_fn(p)] for p in order)
        self.letters = alphabet.signed_letters()
        self._right = {
            l: tuple(
                self._index[product_fn(p, generator_payloads[l])] for p in order
            )
            for l in self.letters
        }
        self._left = {
            l: tuple(
                self._index[product_fn(generator_payloads[l], p)] for p in order
            )
            for l in self.letters
        }
        self._table: tuple[tuple[int, ...], ...] | None = None
        if self.size <= table_cap:
            self._table = tuple(
                tuple(self._index[product_fn(p, q)] for q in order) for p in order
            )
        self.idempotent = tuple(
            self.product(i, i) == i for i in range(self.size)
        )
        if check:
            self._check_axioms(full=self._table is not None)

    def index_of(self, payload) -> int:
        return self._index[payload]

    def product(self, i: int, j: int) -> int:
        if self._table is not None:
            return self._table[i][j]
        return self._index[self._product_fn(self.elements[i], self.elements[j])]

    def inverse_of(self, i: int) -> int:
        return self.inverse[i]

    def is_idempotent(self, i: int) -> bool:
        return self.idempotent[i]

    def natural_leq(self, i: int, j: int) -> bool:
        """Abstract natural order: i <= j iff i = (i i^-1) j."""
        return self.product(self.product(i, self.inverse[i]), j) == i

    def image_of_letter(self, letter: Letter) -> int:
        try:
            return self.gen_images[letter]
        except KeyError:
            raise ValueError(f"unknown generator index {letter.gen}") from None

    def evaluate_word(self, word: Word) -> int:
        out = self.identity
        for l in word:
            out = self.product(out, self.image_of_letter(l))
        return out

    def right_by(self, letter: Letter, i: int) -> int:
        return self._right[letter][i]

    def left_by(self, letter: Letter, i: int) -> int:
        return self._left[letter][i]

    # Duck interface shared with the finite components of product witnesses.
    def mult_index(self, i: int, j: int) -> int:
        return self.product(i, j)

    def inverse_index(self, i: int) -> int:
        return self.inverse[i]

    @property
    def identity_index(self) -> int:
        return self.identity

    def _check_axioms(self, full: bool) -> None:
        """Inverse-monoid sanity: von Neumann inverses, uniqueness, commuting
        idempotents.  Exhaustive when the full table exists, sampled above."""
        for i in range(self.size):
            s = self.inverse[i]
            if self.product(self.product(i, s), i) != i:
                raise ValueError(f"a a' a != a at element {i}")
            if self.product(self.product(s, i), s) != s:
                raise ValueError(f"a' a a' != a' at element {i}")
        idems = [i for i in range(self.size) if self.idempotent[i]]
        if full:
            pairs = itertools.combinations(idems, 2)
            candidates = itertools.product(range(self.size), repeat=2)
        else:
            rng = random.Random(0)
            pairs = (
                (rng.choice(idems), rng.choice(idems)) for _ in range(2000)
            )
            candidates = (
                (rng.randrange(self.size), rng.randrange(self.size))
                for _ in range(2000)
            )
        for e, f in pairs:
            if self.product(e, f) != self.product(f, e):
                raise ValueError(f"idempotents {e} and {f} do not commute")
        for a, s in candidates:
            if s == self.inverse[a]:
                continue
            if (
                self.product(self.product(a, s), a) == a
                and self.product(self.product(s, a), s) == s
            ):
                raise ValueError(f"element {a} has a second inverse {s}")


def enumerate_mm(
    G: FiniteGroup,
    slot_budget: int = DEFAULT_SLOT_BUDGET,
    table_cap: int = DEFAULT_TABLE_CAP,
) -> FiniteInverseMonoid:
    """All pairs (connected graph containing 1 and g, g) as an explicit table."""
    payloads = []
    for mask in connected_subgraph_masks(G, slot_budget):
        if not cayley.is_connected(G, mask):
            continue
        for point in sorted(cayley.vertex_set(G, mask)):
            payloads.append(MMElement(mask, point))
    gens = {l: mm_generator(G, l) for l in G.alphabet.signed_letters()}
    return FiniteInverseMonoid(
        G.alphabet,
        payloads,
        key_fn=lambda p: element_key(G, p),
        product_fn=lambda s, t: mm_multiply(G, s, t),
        inverse_fn=lambda s: mm_inverse(G, s),
        identity_payload=MMElement(0, 0),
        generator_payloads=gens,
        table_cap=table_cap,
    )


def monoid_from_group(G: FiniteGroup, table_cap: int = DEFAULT_TABLE_CAP) -> FiniteInverseMonoid:
    """A finite group viewed as an inverse monoid (every element is a unit)."""
    return FiniteInverseMonoid(
        G.alphabet,
        range(G.order),
        key_fn=lambda g: f"g{g:06d}",
        product_fn=G.mult,
        inverse_fn=G.inverse,
        identity_payload=0,
        generator_payloads={
            l: G.evaluate((l,)) for l in G.alphabet.signed_letters()
        },
        table_cap=table_cap,
    )


def maximal_sigma_elements(
    G: FiniteGroup, g: int, budget: int = DEFAULT_PATH_BUDGET
) -> list[MMElement]:
    """The simple-path spans to ``g``, each paired with ``g``."""
    found = cayley.simple_paths(G, g, budget)
    if found.truncated:
        raise BudgetError("simple-path enumeration truncated")
    out = {MMElement(cayley.span_of_word(G, w), g) for w in found.words}
    return sorted(out, key=lambda el: element_key(G, el))


class Congruence:
    """A partition of monoid element indices, classes keyed by least member."""

    def __init__(self, roots: tuple[int, ...]):
        self.roots = roots

    @property
    def num_classes(self) -> int:
        return len(set(self.roots))

    def same(self, i: int, j: int) -> bool:
        return self.roots[i] == self.roots[j]

    def class_of(self, i: int) -> list[int]:
        r = self.roots[i]
        return [j for j, rj in enumerate(self.roots) if rj == r]

    def classes(self) -> list[list[int]]:
        by_root: dict[int, list[int]] = {}
        for i, r in enumerate(self.roots):
            by_root.setdefault(r, []).append(i)
        return [by_root[r] for r in sorted(by_root)]

    def __eq__(self, other) -> bool:
        return isinstance(other, Congruence) and self.roots == other.roots

    def first_difference(self, other: "Congruence") -> int | None:
        for i, (a, b) in enumerate(zip(self.roots, other.roots)):
            if a != b:
                return i
        return None


def congruence_generated(
    M: FiniteInverseMonoid, pairs: Iterable[tuple[int, int]]
) -> Congruence:
    """Least congruence containing ``pairs``.

    Union-find with a work queue: each executed merge propagates one-letter
    left and right translates, which closes the relation under arbitrary
    multiplication because the generators generate.
    """
    parent = list(range(M.size))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    queue = list(pairs)
    while queue:
        a, b = queue.pop()
        ra, rb = find(a), find(b)
        if ra == rb:
            continue
        if rb < ra:
            ra, rb = rb, ra
        parent[rb] = ra
        for l in M.letters:
            queue.append((M.right_by(l, a), M.right_by(l, b)))
            queue.append((M.left_by(l, a), M.left_by(l, b)))
    roots = tuple(find(i) for i in range(M.size))
    return Congruence(roots)


def min_group_congruence(M: FiniteInverseMonoid) -> Congruence:
    """The least congruence with a group quotient: collapse all idempotents."""
    pairs = [
        (i, M.identity) for i in range(M.size) if M.idempotent[i]
    ]
    cong = congruence_generated(M, pairs)
    # The quotient has a unique idempotent class, hence is a group.
    root = cong.roots[M.identity]
    for i in range(M.size):
        if M.idempotent[i] and cong.roots[i] != root:
            raise AssertionError("idempotents not collapsed to one class")
    return cong


def is_e_unitary(M: FiniteInverseMonoid) -> bool:
    """True iff the sigma-class of the identity is exactly the idempotents."""
    sigma = min_group_congruence(M)
    root = sigma.roots[M.identity]
    for i in range(M.size):
        if (sigma.roots[i] == root) != M.idempotent[i]:
            return False
    return True


def is_f_inverse(M: FiniteInverseMonoid) -> bool:
    """True iff every sigma-class has a maximum in the natural order."""
    sigma = min_group_congruence(M)
    for cls in sigma.classes():
        if not any(all(M.natural_leq(x, y) for x in cls) for y in cls):
            return False
    return True


def sigma_quotient_matches(M: FiniteInverseMonoid, G: FiniteGroup) -> bool:
    """True iff M / sigma is canonically isomorphic to G as a generated group."""
    sigma = min_group_congruence(M)
    label: dict[int, int] = {sigma.roots[M.identity]: 0}
    queue = [sigma.roots[M.identity]]
    while queue:
        root = queue.pop()
        g = label[root]
        for l in M.letters:
            nxt = sigma.roots[M.right_by(l, root)]
            h = G.step(g, l)
            if nxt in label:
                if label[nxt] != h:
                    return False
            else:
                label[nxt] = h
                queue.append(nxt)
    if len(label) != sigma.num_classes or sigma.num_classes != G.order:
        return False
    return len(set(label.values())) == G.order


def is_strongly_f_inverse_quotient(
    M: FiniteInverseMonoid, G: FiniteGroup, path_budget: int = DEFAULT_PATH_BUDGET
) -> bool | None:
    """Do all coterminal simple paths of Cay(G) collapse to one element of M?

    Returns None ("unknown, budget") when the simple-path enumeration was
    truncated.  Raises ValueError when M's maximum group image is not
    canonically G.
    """
    if not sigma_quotient_matches(M, G):
        raise ValueError("maximum group image of M is not canonically G")
    for g in range(G.order):
        found = cayley.simple_paths(G, g, path_budget)
        if found.truncated:
            return None
        images = {M.evaluate_word(w) for w in found.words}
        if len(images) > 1:
            return False
    return True


def dump_text(M: FiniteInverseMonoid) -> str:
    """One element per line: key, inverse key, idempotent flag (tab-separated)."""
    lines = []
    for i in range(M.size):
        lines.append(
            f"{M.keys[i]}\t{M.keys[M.inverse[i]]}\t{1 if M.idempotent[i] else 0}"
        )
    return "\n".join(lines) + "\n"


TABLE_MAGIC = b"IMTB"
TABLE_VERSION = 1


def table_blob(M: FiniteInverseMonoid, size_cap: int = 2048) -> bytes:
    """Binary multiplication table: 16-byte header then size^2 u32 LE entries."""
    if M.size > size_cap:
        raise BudgetError("monoid too large to dump as a table blob")
    head = struct.pack("<4sIII", TABLE_MAGIC, TABLE_VERSION, M.size, 0)
    body = b"".join(
        struct.pack("<I", M.product(i, j))
        for i in range(M.size)
        for j in range(M.size)
    )
    return head + body
