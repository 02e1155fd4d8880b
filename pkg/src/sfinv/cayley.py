"""Finite subgraphs of the Cayley graph of a finite generated group.

A subgraph is a bitmask over positive edge slots: the edge from ``src``
labelled by generator ``gen`` occupies slot ``src * k + gen`` where ``k`` is
the alphabet size.  Inverse edges are implicit (subgraphs are inverse-closed
by convention) and the base vertex is always the group identity, so the
vertex set of a mask is ``{0}`` plus all endpoints of its edges.

Simple-cycle searches power the cyclic-subgraph predicate and the cyclic
closure operator.  Per-generator cycle unions at the identity are computed
once per group and translated by the left action everywhere else; closure is
still a fixpoint iteration because fresh cycles can cross both operands of a
union.
"""

from __future__ import annotations

from typing import NamedTuple

from .errors import BudgetError
from .groups import FiniteGroup
from .words import EMPTY_WORD, Letter, Word, is_cyclically_reduced, word_sort_key

DEFAULT_CYCLE_BUDGET = 1_000_000

EMPTY_SUBGRAPH = 0


class PathSearch(NamedTuple):
    words: tuple[Word, ...]
    truncated: bool


def slot(G: FiniteGroup, src: int, gen: int) -> int:
    return src * len(G.alphabet) + gen


def slot_edge(G: FiniteGroup, s: int) -> tuple[int, int]:
    return divmod(s, len(G.alphabet))


def iter_edges(G: FiniteGroup, sub: int):
    """Yield (src, gen) pairs of a mask in slot order."""
    k = len(G.alphabet)
    s = 0
    while sub:
        if sub & 1:
            yield divmod(s, k)
        sub >>= 1
        s += 1


def vertex_set(G: FiniteGroup, sub: int) -> set[int]:
    verts = {0}
    for src, gen in iter_edges(G, sub):
        verts.add(src)
        verts.add(G.gen_action[gen][src])
    return verts


def is_connected(G: FiniteGroup, sub: int) -> bool:
    """True iff every vertex of the mask is reachable from the identity."""
    verts = vertex_set(G, sub)
    if len(verts) == 1:
        return True
    adj: dict[int, list[int]] = {v: [] for v in verts}
    for src, gen in iter_edges(G, sub):
        tgt = G.gen_action[gen][src]
        adj[src].append(tgt)
        adj[tgt].append(src)
    seen = {0}
    stack = [0]
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen == verts


def span_of_word(G: FiniteGroup, word: Word) -> int:
    """Edges traversed by the path from the identity labelled by ``word``."""
    sub = 0
    g = 0
    for l in word:
        if l.sign > 0:
            sub |= 1 << slot(G, g, l.gen)
            g = G.gen_action[l.gen][g]
        else:
            g = G.gen_action_inv[l.gen][g]
            sub |= 1 << slot(G, g, l.gen)
    return sub


def translate(G: FiniteGroup, g: int, sub: int) -> int:
    """Left action: every edge ``(h, x)`` maps to ``(g.h, x)``."""
    if g == 0 or sub == 0:
        return sub
    k = len(G.alphabet)
    out = 0
    s = 0
    while sub:
        if sub & 1:
            src, gen = divmod(s, k)
            out |= 1 << (G.mult(g, src) * k + gen)
        sub >>= 1
        s += 1
    return out


def subgraph_key(G: FiniteGroup, sub: int) -> str:
    parts = [f"{src}:{G.alphabet.names[gen]}" for src, gen in iter_edges(G, sub)]
    return ",".join(parts)


def simple_paths(
    G: FiniteGroup, target: int, budget: int = DEFAULT_CYCLE_BUDGET
) -> PathSearch:
    """Label words of all simple paths identity ~> target, lexicographically.

    ``target == 0`` yields exactly the empty path.  A blown budget returns
    the partial listing flagged ``truncated``.
    """
    if target == 0:
        return PathSearch((EMPTY_WORD,), False)
    letters = G.alphabet.signed_letters()
    found: list[Word] = []
    truncated = False
    extensions = 0
    path: list[Letter] = []
    visited = {0}
    stack: list[list[int]] = [[0, 0]]  # [vertex, next letter index]
    while stack:
        v, i = stack[-1]
        if i == len(letters):
            stack.pop()
            if path:
                path.pop()
                visited.discard(v)
            continue
        stack[-1][1] += 1
        letter = letters[i]
        extensions += 1
        if extensions > budget:
            truncated = True
            break
        t = G.step(v, letter)
        if t == target:
            found.append(tuple(path) + (letter,))
        elif t not in visited:
            visited.add(t)
            path.append(letter)
            stack.append([t, 0])
    found = sorted(set(found), key=word_sort_key)
    return PathSearch(tuple(found), truncated)


def _simple_cycle_search(G: FiniteGroup, first: Letter | None, budget: int):
    """DFS all simple cycles based at the identity; yields (word, edge mask).

    ``first`` pins the first letter (used for per-edge cycle unions).
    Raises BudgetError when the extension budget runs out, carrying the
    masks found so far.
    """
    letters = G.alphabet.signed_letters()
    extensions = 0

    def edge_bit(v: int, letter: Letter, t: int) -> int:
        if letter.sign > 0:
            return 1 << slot(G, v, letter.gen)
        return 1 << slot(G, t, letter.gen)

    results: list[tuple[Word, int]] = []
    start_letters = [first] if first is not None else letters
    for l0 in start_letters:
        t0 = G.step(0, l0)
        extensions += 1
        if t0 == 0:
            results.append(((l0,), edge_bit(0, l0, 0)))
            continue
        path = [l0]
        visited = {0, t0}
        mask_stack = [edge_bit(0, l0, t0)]
        stack: list[list[int]] = [[t0, 0]]
        while stack:
            v, i = stack[-1]
            if i == len(letters):
                stack.pop()
                path.pop()
                mask_stack.pop()
                visited.discard(v)
                continue
            stack[-1][1] += 1
            letter = letters[i]
            extensions += 1
            if extensions > budget:
                raise BudgetError(
                    "simple-cycle search budget exceeded",
                    partial=[m for _, m in results],
                )
            t = G.step(v, letter)
            bit = edge_bit(v, letter, t)
            if t == 0:
                results.append((tuple(path) + (letter,), mask_stack[-1] | bit))
            elif t not in visited:
                visited.add(t)
                path.append(letter)
                mask_stack.append(mask_stack[-1] | bit)
                stack.append([t, 0])
    return results


def simple_cycles_at_identity(
    G: FiniteGroup, budget: int = DEFAULT_CYCLE_BUDGET
) -> PathSearch:
    """All cyclically reduced label words of simple cycles based at 1.

    By the left-action argument this is the full set of cyclic words of the
    group: a cycle anywhere translates to one based at the identity.
    """
    try:
        results = _simple_cycle_search(G, None, budget)
        truncated = False
    except BudgetError:
        return PathSearch((), True)
    cyclic = sorted(
        {w for w, _ in results if is_cyclically_reduced(w)}, key=word_sort_key
    )
    return PathSearch(tuple(cyclic), truncated)


def is_cyclic_word(G: FiniteGroup, word: Word) -> bool:
    """True iff ``word`` is cyclically reduced and traces a simple cycle at 1."""
    if not word or not is_cyclically_reduced(word):
        return False
    g = 0
    seen = {0}
    for l in word[:-1]:
        g = G.step(g, l)
        if g in seen:
            return False
        seen.add(g)
    return G.step(g, word[-1]) == 0


def all_relators_cyclic(G: FiniteGroup, relators: list[Word]) -> bool:
    """True iff every relator labels a simple cycle of the Cayley graph."""
    return all(is_cyclic_word(G, r) for r in relators)


def _edge_cycle_stars(G: FiniteGroup, budget: int) -> tuple[int, ...]:
    """Per generator, the union of all simple cycles through edge (1, x).

    Cached on the group; a blown budget is a hard error because closures
    must be exact.
    """
    cached = G._caches.get("cycle_stars")
    if cached is not None:
        return cached  # type: ignore[return-value]
    stars = []
    for gen in range(len(G.alphabet)):
        results = _simple_cycle_search(G, Letter(gen, 1), budget)
        star = 1 << slot(G, 0, gen)
        for _, mask in results:
            star |= mask
        stars.append(star)
    out = tuple(stars)
    G._caches["cycle_stars"] = out
    return out


def is_cyclic_subgraph(
    G: FiniteGroup, sub: int, budget: int = DEFAULT_CYCLE_BUDGET
) -> bool:
    """True iff every simple cycle through an edge of ``sub`` stays inside it."""
    stars = _edge_cycle_stars(G, budget)
    for src, gen in iter_edges(G, sub):
        if translate(G, src, stars[gen]) & ~sub:
            return False
    return True


def cyclic_closure(G: FiniteGroup, sub: int, budget: int = DEFAULT_CYCLE_BUDGET) -> int:
    """Least cyclic subgraph containing ``sub`` (fixpoint of cycle unions)."""
    stars = _edge_cycle_stars(G, budget)
    closed = sub
    frontier = sub
    while frontier:
        added = 0
        for src, gen in iter_edges(G, frontier):
            added |= translate(G, src, stars[gen])
        frontier = added & ~closed
        closed |= added
    return closed


def cayley_dot(G: FiniteGroup, highlight: int | None = None) -> str:
    """Deterministic DOT text for the full Cayley graph.

    Positive edges only; edges of ``highlight`` are drawn bold red.
    """
    lines = ["digraph cayley {"]
    for g in range(G.order):
        lines.append(f'  v{g} [label="{g}"];')
    k = len(G.alphabet)
    for g in range(G.order):
        for gen in range(k):
            t = G.gen_action[gen][g]
            attrs = f'label="{G.alphabet.names[gen]}"'
            if highlight is not None and highlight >> slot(G, g, gen) & 1:
                attrs += ", color=red, penwidth=2"
            lines.append(f"  v{g} -> v{t} [{attrs}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def subgraph_dot(G: FiniteGroup, sub: int) -> str:
    """Deterministic DOT text for a subgraph alone (plus the base vertex)."""
    lines = ["digraph subgraph {"]
    for v in sorted(vertex_set(G, sub)):
        lines.append(f'  v{v} [label="{v}"];')
    for src, gen in iter_edges(G, sub):
        t = G.gen_action[gen][src]
        lines.append(f'  v{src} -> v{t} [label="{G.alphabet.names[gen]}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
