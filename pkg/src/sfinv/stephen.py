"""Stephen-procedure approximants for special inverse monoid presentations.

Word graphs are deterministic, inverse-closed, edge-labelled graphs with a
base and a tip.  An approximant starts from the folded linear graph of a
word and repeatedly runs expansion rounds: every relator that does not
already read as a closed path at a vertex gets a fresh loop attached there,
then the graph is folded.  Reading a word in any approximant is a sound
positive certificate (approximants embed label-preservingly in the limit);
the procedure gives no negative certificates, so "unknown" is an explicit
value, never an exception.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import BudgetError
from .words import Alphabet, Letter, Word, format_word, parse_word

DEFAULT_ROUNDS = 8
DEFAULT_VERTEX_BUDGET = 100_000


@dataclass(frozen=True)
class Presentation:
    """A special presentation: every relator r imposes r = 1."""

    alphabet: Alphabet
    relators: tuple[Word, ...]

    def __post_init__(self) -> None:
        if not self.relators:
            raise ValueError("presentation needs at least one relator")
        for r in self.relators:
            if not r:
                raise ValueError("the empty relator is rejected")
            for l in r:
                if not 0 <= l.gen < len(self.alphabet):
                    raise ValueError("relator letter outside the alphabet")


def presentation_from_strings(
    relators: list[str], generators: str | None = None
) -> Presentation:
    """Build a presentation from compact word syntax.

    Without an explicit generator list the alphabet is the sorted set of
    letters appearing in the relators.
    """
    if generators is None:
        seen = {ch.lower() for r in relators for ch in r if not ch.isspace() and ch != "1"}
        generators = "".join(sorted(seen))
    alphabet = Alphabet.of(generators)
    return Presentation(alphabet, tuple(parse_word(r, alphabet) for r in relators))


class WordGraph:
    """Rooted edge-labelled graph; deterministic only once folded."""

    def __init__(
        self,
        num_vertices: int,
        edges: list[tuple[int, Letter, int]],
        base: int,
        tip: int,
        *,
        stage: int = 0,
        fixpoint: bool = False,
    ):
        self.num_vertices = num_vertices
        self.edges = list(edges)
        self.base = base
        self.tip = tip
        self.stage = stage
        self.fixpoint = fixpoint
        self._out: list[dict[Letter, int]] | None = None

    def _index(self) -> list[dict[Letter, int]]:
        if self._out is None:
            out: list[dict[Letter, int]] = [dict() for _ in range(self.num_vertices)]
            for u, letter, v in self.edges:
                for a, l, b in ((u, letter, v), (v, letter.inverse(), u)):
                    existing = out[a].get(l)
                    if existing is not None and existing != b:
                        raise ValueError("graph is not folded; fold it first")
                    out[a][l] = b
            self._out = out
        return self._out

    @property
    def is_folded(self) -> bool:
        try:
            self._index()
            return True
        except ValueError:
            return False

    def target(self, v: int, letter: Letter) -> int | None:
        return self._index()[v].get(letter)

    def reads(self, start: int, word: Word) -> int | None:
        """Endpoint of the word-labelled path from ``start``, or None."""
        v: int | None = start
        for l in word:
            v = self.target(v, l)
            if v is None:
                return None
        return v

    def reads_closed(self, v: int, word: Word) -> bool:
        return self.reads(v, word) == v

    def canonical_form(self) -> tuple:
        """Canonical BFS renumbering from the base; equal forms mean
        base/tip-preserving labelled isomorphism (graphs are deterministic
        and connected)."""
        out = self._index()
        letters = sorted(out_letters_union(out), key=lambda l: (l.gen, -l.sign))
        order = {self.base: 0}
        queue = [self.base]
        while queue:
            v = queue.pop(0)
            for l in letters:
                t = out[v].get(l)
                if t is not None and t not in order:
                    order[t] = len(order)
                    queue.append(t)
        edges = set()
        for u, letter, v in self.edges:
            if letter.sign < 0:
                u, letter, v = v, letter.inverse(), u
            edges.add((order[u], letter, order[v]))
        return (len(order), order[self.tip], tuple(sorted(edges)))


def out_letters_union(out: list[dict[Letter, int]]) -> set[Letter]:
    letters: set[Letter] = set()
    for d in out:
        letters.update(d)
    return letters


def linear_graph(word: Word) -> WordGraph:
    """The path spelling ``word``: base at the start, tip at the end."""
    edges = [(i, l, i + 1) for i, l in enumerate(word)]
    return WordGraph(len(word) + 1, edges, 0, len(word))


def fold(graph: WordGraph, rng: random.Random | None = None) -> WordGraph:
    """Least deterministic quotient, by union-find over a merge queue.

    The result is independent of merge processing order up to labelled
    rooted isomorphism; ``rng`` shuffles the work order (used by the
    confluence tests).
    """
    parent = list(range(graph.num_vertices))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    out: dict[int, dict[Letter, int]] = {}
    work: list[tuple] = [("edge", u, l, v) for u, l, v in graph.edges]
    if rng is not None:
        rng.shuffle(work)

    def insert(a: int, l: Letter, b: int) -> None:
        d = out.setdefault(a, {})
        cur = d.get(l)
        if cur is None:
            d[l] = b
        elif find(cur) != find(b):
            work.append(("merge", cur, b))

    while work:
        if rng is not None and len(work) > 1:
            i = rng.randrange(len(work))
            work[i], work[-1] = work[-1], work[i]
        item = work.pop()
        if item[0] == "edge":
            _, u, l, v = item
            u, v = find(u), find(v)
            insert(u, l, v)
            insert(v, l.inverse(), u)
        else:
            _, a, b = item
            ra, rb = find(a), find(b)
            if ra == rb:
                continue
            da, db = out.get(ra, {}), out.get(rb, {})
            if len(da) < len(db):
                ra, rb = rb, ra
                da, db = db, da
            parent[rb] = ra
            for l, t in db.items():
                insert(ra, l, t)
            out.pop(rb, None)

    # Compact to dense ids in BFS order from the base for determinism.
    reps: dict[int, int] = {}
    base = find(graph.base)
    reps[base] = 0
    queue = [base]
    letter_order = lambda l: (l.gen, -l.sign)
    while queue:
        v = queue.pop(0)
        for l in sorted(out.get(v, {}), key=letter_order):
            t = find(out[v][l])
            if t not in reps:
                reps[t] = len(reps)
                queue.append(t)
    edges = set()
    for v, d in out.items():
        rv = find(v)
        for l, t in d.items():
            rt = find(t)
            if l.sign > 0:
                edges.add((reps[rv], l, reps[rt]))
            else:
                edges.add((reps[rt], l.inverse(), reps[rv]))
    return WordGraph(
        len(reps),
        sorted(edges, key=lambda e: (e[0], e[1].gen, -e[1].sign, e[2])),
        0,
        reps[find(graph.tip)],
        stage=graph.stage,
        fixpoint=graph.fixpoint,
    )


def _is_closed(graph: WordGraph, presentation: Presentation) -> bool:
    return all(
        graph.reads_closed(v, r)
        for v in range(graph.num_vertices)
        for r in presentation.relators
    )


def expand_round(
    graph: WordGraph,
    presentation: Presentation,
    vertex_budget: int = DEFAULT_VERTEX_BUDGET,
) -> WordGraph:
    """One expansion round over a snapshot of the current vertices.

    Attaches a fresh relator loop at every vertex where the relator does not
    already read as a closed path, then folds.  The returned graph carries
    ``fixpoint=True`` when it is closed, i.e. exact from now on.
    """
    if not graph.is_folded:
        raise ValueError("expand_round requires a folded graph")
    edges = list(graph.edges)
    n = graph.num_vertices
    attached = 0
    for v in range(graph.num_vertices):
        for r in presentation.relators:
            if graph.reads_closed(v, r):
                continue
            if n + len(r) - 1 > vertex_budget:
                raise BudgetError("vertex budget exceeded", partial=graph)
            prev = v
            for l in r[:-1]:
                edges.append((prev, l, n))
                prev = n
                n += 1
            edges.append((prev, r[-1], v))
            attached += 1
    if attached == 0:
        out = WordGraph(
            graph.num_vertices, graph.edges, graph.base, graph.tip,
            stage=graph.stage + 1, fixpoint=True,
        )
        return out
    folded = fold(WordGraph(n, edges, graph.base, graph.tip))
    folded.stage = graph.stage + 1
    folded.fixpoint = _is_closed(folded, presentation)
    return folded


def approximant(
    presentation: Presentation,
    word: Word,
    rounds: int = DEFAULT_ROUNDS,
    vertex_budget: int = DEFAULT_VERTEX_BUDGET,
) -> WordGraph:
    """Fold the linear graph of ``word`` and run up to ``rounds`` expansions.

    Stops early at a fixpoint, in which case the result is the exact
    Schutzenberger graph of the word.
    """
    graph = fold(linear_graph(word))
    graph.fixpoint = _is_closed(graph, presentation)
    for _ in range(rounds):
        if graph.fixpoint:
            break
        graph = expand_round(graph, presentation, vertex_budget)
    return graph


@dataclass(frozen=True)
class Certificate:
    """A sound positive certificate, or the explicit absence of one.

    ``fixpoint`` reports whether the last approximant examined was exact;
    with ``certified=False`` and ``fixpoint=True`` the non-readability is
    definitive, but negative verdicts are still left to witness carriers.
    """

    certified: bool
    stage: int | None
    vertices: int
    fixpoint: bool

    def __bool__(self) -> bool:
        return self.certified

    def to_json(self, query: str) -> dict:
        return {
            "query": query,
            "verdict": "certified" if self.certified else "unknown",
            "stage": self.stage,
            "vertices": self.vertices,
            "fixpoint": self.fixpoint,
        }


@dataclass(frozen=True)
class CertificatePair:
    """Conjunction of two one-sided certificates."""

    first: Certificate
    second: Certificate

    @property
    def certified(self) -> bool:
        return self.first.certified and self.second.certified

    def __bool__(self) -> bool:
        return self.certified

    @property
    def stage(self) -> int | None:
        if not self.certified:
            return None
        return max(self.first.stage, self.second.stage)


def _staged_search(
    presentation: Presentation,
    base_word: Word,
    check,
    rounds: int,
    vertex_budget: int,
) -> Certificate:
    graph = fold(linear_graph(base_word))
    graph.fixpoint = _is_closed(graph, presentation)
    stage = 0
    while True:
        if check(graph):
            return Certificate(True, stage, graph.num_vertices, graph.fixpoint)
        if graph.fixpoint or stage >= rounds:
            return Certificate(False, None, graph.num_vertices, graph.fixpoint)
        try:
            graph = expand_round(graph, presentation, vertex_budget)
        except BudgetError:
            return Certificate(False, None, graph.num_vertices, False)
        stage += 1


def certify_right_invertible(
    presentation: Presentation,
    word: Word,
    rounds: int = DEFAULT_ROUNDS,
    vertex_budget: int = DEFAULT_VERTEX_BUDGET,
) -> Certificate:
    """Certified(k) iff ``word`` reads from the base of the stage-k
    approximant of the empty word; then w w^-1 = 1 in the presented monoid."""
    return _staged_search(
        presentation,
        (),
        lambda g: g.reads(g.base, word) is not None,
        rounds,
        vertex_budget,
    )


def certify_invertible(
    presentation: Presentation,
    word: Word,
    rounds: int = DEFAULT_ROUNDS,
    vertex_budget: int = DEFAULT_VERTEX_BUDGET,
) -> CertificatePair:
    """Right invertibility of the word and of its inverse (= left side)."""
    from .words import invert

    right = certify_right_invertible(presentation, word, rounds, vertex_budget)
    left = certify_right_invertible(presentation, invert(word), rounds, vertex_budget)
    return CertificatePair(right, left)


def certify_leq(
    presentation: Presentation,
    upper: Word,
    lower: Word,
    rounds: int = DEFAULT_ROUNDS,
    vertex_budget: int = DEFAULT_VERTEX_BUDGET,
) -> Certificate:
    """Certified iff ``upper`` reads base-to-tip in an approximant of
    ``lower``; then [lower] <= [upper] in the natural order."""
    return _staged_search(
        presentation,
        lower,
        lambda g: g.reads(g.base, upper) == g.tip,
        rounds,
        vertex_budget,
    )


def certify_equal(
    presentation: Presentation,
    u: Word,
    v: Word,
    rounds: int = DEFAULT_ROUNDS,
    vertex_budget: int = DEFAULT_VERTEX_BUDGET,
) -> CertificatePair:
    """Both natural-order inequalities, hence equality when certified."""
    le = certify_leq(presentation, u, v, rounds, vertex_budget)
    ge = certify_leq(presentation, v, u, rounds, vertex_budget)
    return CertificatePair(le, ge)


def word_graph_dot(graph: WordGraph, alphabet: Alphabet) -> str:
    """Deterministic DOT text; base drawn as a double circle, tip filled."""
    lines = ["digraph wordgraph {"]
    for v in range(graph.num_vertices):
        attrs = f'label="{v}"'
        if v == graph.base:
            attrs += ", shape=doublecircle"
        if v == graph.tip:
            attrs += ", style=filled, fillcolor=lightgray"
        lines.append(f"  v{v} [{attrs}];")
    seen = set()
    for u, letter, v in graph.edges:
        if letter.sign < 0:
            u, letter, v = v, letter.inverse(), u
        seen.add((u, letter, v))
    for u, letter, v in sorted(seen, key=lambda e: (e[0], e[1].gen, e[2])):
        lines.append(f'  v{u} -> v{v} [label="{alphabet.char(letter)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
