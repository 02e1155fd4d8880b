"""Explicit finite generated groups and the arithmetic their Cayley graphs need.

Elements are dense integer indices with the identity pinned at index 0, so
that downstream bitset representations can key edge slots on
``(element index, generator index)``.  Groups arrive either as permutations
(closed under a budgeted breadth-first closure) or as validated
multiplication tables; there is no construction from group relators.
"""

from __future__ import annotations

import re
from pathlib import Path

from .errors import BudgetError
from .words import Alphabet, Letter, Word, invert

DEFAULT_CLOSURE_BUDGET = 10_000

# Above this order the full multiplication table is not materialized and
# products fall back to re-reading a generator word recorded during BFS.
_MULT_TABLE_CAP = 4096


class FiniteGroup:
    """A finite group generated by the letters of an alphabet.

    ``gen_action[x][g]`` is the index of ``g . [x]`` (right multiplication by
    the generator ``x``).  Immutable after construction; all methods are pure.
    """

    def __init__(self, alphabet: Alphabet, gen_action: list[list[int]]):
        if len(gen_action) != len(alphabet):
            raise ValueError("one action per generator required")
        order = len(gen_action[0]) if gen_action else 0
        if order == 0:
            raise ValueError("group must have at least the identity element")
        for row in gen_action:
            if sorted(row) != list(range(order)):
                raise ValueError("invalid permutation")
        self.alphabet = alphabet
        self.order = order
        self.gen_action = tuple(tuple(row) for row in gen_action)
        self.gen_action_inv = tuple(_invert_permutation(row) for row in self.gen_action)
        self._witness_words = self._bfs_words()
        self.inv_table = tuple(
            self.evaluate(invert(self._witness_words[g])) for g in range(order)
        )
        self._mult: tuple[tuple[int, ...], ...] | None = None
        if order <= _MULT_TABLE_CAP:
            self._mult = self._build_mult_table()
        self._caches: dict[str, object] = {}

    def _bfs_words(self) -> tuple[Word, ...]:
        """A generator word reaching each element from the identity (BFS order)."""
        words: list[Word | None] = [None] * self.order
        words[0] = ()
        queue = [0]
        while queue:
            nxt = []
            for g in queue:
                for x, row in enumerate(self.gen_action):
                    h = row[g]
                    if words[h] is None:
                        words[h] = words[g] + (Letter(x, 1),)
                        nxt.append(h)
            queue = nxt
        if any(w is None for w in words):
            raise ValueError("not X-generated")
        return tuple(words)  # type: ignore[arg-type]

    def _build_mult_table(self) -> tuple[tuple[int, ...], ...]:
        # mult[g][h] filled along BFS discovery: h = h'.x gives g.h = (g.h').x
        order = self.order
        table = [[0] * order for _ in range(order)]
        for g in range(order):
            table[g][0] = g
        by_length = sorted(range(order), key=lambda h: len(self._witness_words[h]))
        for h in by_length:
            w = self._witness_words[h]
            if not w:
                continue
            parent = self.evaluate(w[:-1])
            x = w[-1].gen
            row = self.gen_action[x]
            for g in range(order):
                table[g][h] = row[table[g][parent]]
        return tuple(tuple(r) for r in table)

    def __len__(self) -> int:
        return self.order

    def step(self, g: int, letter: Letter) -> int:
        if letter.gen >= len(self.alphabet):
            raise ValueError(f"unknown generator index {letter.gen}")
        if letter.sign > 0:
            return self.gen_action[letter.gen][g]
        return self.gen_action_inv[letter.gen][g]

    def evaluate(self, word: Word, start: int = 0) -> int:
        g = start
        for l in word:
            g = self.step(g, l)
        return g

    def mult(self, g: int, h: int) -> int:
        if self._mult is not None:
            return self._mult[g][h]
        return self.evaluate(self._witness_words[h], start=g)

    def inverse(self, g: int) -> int:
        return self.inv_table[g]


def _invert_permutation(row) -> tuple[int, ...]:
    inv = [0] * len(row)
    for i, v in enumerate(row):
        inv[v] = i
    return tuple(inv)


def from_permutations(
    gens: dict[str, list[int]], budget: int = DEFAULT_CLOSURE_BUDGET
) -> FiniteGroup:
    """Close a set of permutations into a group, numbering elements by BFS.

    The identity permutation gets index 0 and ``gen_action`` is right
    multiplication (permutations composed left to right).
    """
    if not gens:
        raise ValueError("at least one generator required")
    names = tuple(gens.keys())
    alphabet = Alphabet(names)
    degree = None
    perms = []
    for name in names:
        p = tuple(gens[name])
        if degree is None:
            degree = len(p)
        if len(p) != degree or sorted(p) != list(range(degree)):
            raise ValueError(f"invalid permutation for generator {name!r}")
        perms.append(p)
    identity = tuple(range(degree or 0))
    index = {identity: 0}
    elements = [identity]
    queue = [identity]
    while queue:
        nxt = []
        for sigma in queue:
            for p in perms:
                tau = tuple(p[s] for s in sigma)
                if tau not in index:
                    if len(elements) >= budget:
                        raise BudgetError("group too large")
                    index[tau] = len(elements)
                    elements.append(tau)
                    nxt.append(tau)
        queue = nxt
    gen_action = []
    for p in perms:
        row = [index[tuple(p[s] for s in sigma)] for sigma in elements]
        gen_action.append(row)
    return FiniteGroup(alphabet, gen_action)


def from_table(
    mult: list[list[int]],
    alphabet: Alphabet,
    gen_indices: list[int],
    assoc_budget: int = 2_000_000,
) -> FiniteGroup:
    """Validate a multiplication table and wrap it as a group.

    Checks the identity row/column (index 0 must be the identity), two-sided
    inverses, full associativity (budgeted at ``assoc_budget`` triples), and
    that the designated generators reach every element.
    """
    n = len(mult)
    if n == 0:
        raise ValueError("empty table")
    for row in mult:
        if len(row) != n or any(not (0 <= v < n) for v in row):
            raise ValueError("table entries out of range")
    for i in range(n):
        if mult[0][i] != i or mult[i][0] != i:
            raise ValueError("element 0 is not a two-sided identity")
    for i in range(n):
        if not any(mult[i][j] == 0 and mult[j][i] == 0 for j in range(n)):
            raise ValueError(f"no two-sided inverse for element {i}")
    if n**3 > assoc_budget:
        raise BudgetError("group too large for the associativity check")
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if mult[mult[i][j]][k] != mult[i][mult[j][k]]:
                    raise ValueError(f"associativity fails at ({i},{j},{k})")
    if len(gen_indices) != len(alphabet):
        raise ValueError("one generator index per alphabet letter required")
    gen_action = [[mult[g][x] for g in range(n)] for x in gen_indices]
    reached = {0}
    frontier = [0]
    while frontier:
        nxt = []
        for g in frontier:
            for row in gen_action:
                h = row[g]
                if h not in reached:
                    reached.add(h)
                    nxt.append(h)
        frontier = nxt
    if len(reached) != n:
        raise ValueError("not X-generated")
    return FiniteGroup(alphabet, gen_action)


def cyclic_group(n: int, name: str = "a") -> FiniteGroup:
    if n < 1:
        raise ValueError("order must be positive")
    return from_permutations({name: [(i + 1) % n for i in range(n)]})


_PERM_SPEC = re.compile(r"([a-z]):((?:\([^()]*\))+)")


def _parse_cycles(text: str, degree_hint: int) -> list[int]:
    moves: dict[int, int] = {}
    top = degree_hint - 1
    for cycle in re.findall(r"\(([^()]*)\)", text):
        points = [int(t) for t in re.split(r"[\s,]+", cycle.strip()) if t]
        if len(set(points)) != len(points):
            raise ValueError(f"repeated point in cycle ({cycle})")
        for p in points:
            if p < 0:
                raise ValueError("cycle points must be non-negative")
            top = max(top, p)
        for i, p in enumerate(points):
            if p in moves:
                raise ValueError(f"point {p} moved twice")
            moves[p] = points[(i + 1) % len(points)]
    perm = [moves.get(i, i) for i in range(top + 1)]
    return perm


def parse_group_spec(
    spec: str, root: Path | None = None, budget: int = DEFAULT_CLOSURE_BUDGET
) -> FiniteGroup:
    """Parse the group description text format.

    Accepted forms (an optional leading ``group`` keyword is tolerated)::

        cyclic <n> <generator-letter>
        perm <letter>:(cycle)(cycle)... <letter>:(...)...
        table <file>
    """
    tokens = spec.split()
    if tokens and tokens[0] == "group":
        tokens = tokens[1:]
    if not tokens:
        raise ValueError("empty group description")
    kind, rest = tokens[0], tokens[1:]
    if kind == "cyclic":
        if len(rest) != 2:
            raise ValueError("usage: cyclic <n> <generator-letter>")
        return cyclic_group(int(rest[0]), rest[1])
    if kind == "perm":
        body = " ".join(rest)
        found = _PERM_SPEC.findall(body)
        if not found:
            raise ValueError("usage: perm <letter>:(cycle)... ...")
        degree = 0
        raw: list[tuple[str, str]] = []
        for name, cycles in found:
            raw.append((name, cycles))
            for cyc in re.findall(r"\(([^()]*)\)", cycles):
                for t in re.split(r"[\s,]+", cyc.strip()):
                    if t:
                        degree = max(degree, int(t) + 1)
        gens = {name: _parse_cycles(cycles, degree) for name, cycles in raw}
        return from_permutations(gens, budget=budget)
    if kind == "table":
        if len(rest) != 1:
            raise ValueError("usage: table <file>")
        path = Path(rest[0])
        if root is not None and not path.is_absolute():
            path = root / path
        return parse_table_file(path.read_text())
    raise ValueError(f"unknown group description kind {kind!r}")


def parse_table_file(text: str) -> FiniteGroup:
    """Parse the ``table`` file format: n, then n rows, then ``gens: a=1 ...``."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines:
        raise ValueError("empty table file")
    n = int(lines[0])
    if len(lines) < n + 2:
        raise ValueError("table file truncated")
    mult = []
    for ln in lines[1 : n + 1]:
        row = [int(t) for t in ln.split()]
        mult.append(row)
    gens_line = lines[n + 1]
    if not gens_line.startswith("gens:"):
        raise ValueError("missing 'gens:' line")
    names = []
    indices = []
    for part in gens_line[len("gens:") :].split():
        name, _, idx = part.partition("=")
        if not idx:
            raise ValueError(f"bad generator assignment {part!r}")
        names.append(name)
        indices.append(int(idx))
    return from_table(mult, Alphabet(tuple(names)), indices)
