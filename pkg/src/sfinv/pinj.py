"""Exact symbolic partial injections on the naturals, and witness carriers.

A map is a finite list of branches, each an affine rule n -> (p*n + q)/d on
an arithmetic progression, plus finitely many exceptional points.  Branch
domains and exception points are pairwise disjoint, and so are their images,
which makes the whole map injective.  Composition is left to right
throughout this module (apply the left operand first); word evaluation under
a witness assignment iterates composition in letter order, which is the one
conversion point to the rest of the library.

Composites intersect progressions by CRT, so all arithmetic is exact
arbitrary-precision integer arithmetic.
"""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass, field
from math import gcd, lcm

from .errors import SoundnessError
from .stephen import Presentation
from .words import Letter, Word, format_word

__all__ = [
    "Progression",
    "AffineRule",
    "StructuredPinj",
    "compose",
    "invert_pinj",
    "equals",
    "is_identity",
    "evaluate",
    "domain_idempotent",
    "range_idempotent",
    "Zmod",
    "FiniteElement",
    "ProductElement",
    "WitnessAssignment",
    "WitnessValidationError",
    "check_relators",
    "certify_non_left_invertible",
    "certify_non_right_invertible",
    "builtin_witnesses",
    "parse_witness_file",
    "format_witness",
]


@dataclass(frozen=True, order=True)
class Progression:
    """{n >= start : n = residue (mod modulus)}; start is the least member."""

    residue: int
    modulus: int
    start: int = 0

    def __post_init__(self) -> None:
        if self.modulus < 1:
            raise ValueError("modulus must be >= 1")
        if not 0 <= self.residue < self.modulus:
            raise ValueError("residue must satisfy 0 <= r < m")
        if self.start < 0:
            raise ValueError("start must be >= 0")
        lifted = self.start + (self.residue - self.start) % self.modulus
        object.__setattr__(self, "start", lifted)

    def __contains__(self, n: int) -> bool:
        return n >= self.start and n % self.modulus == self.residue


NATURALS = Progression(0, 1, 0)


@dataclass(frozen=True, order=True)
class AffineRule:
    """n -> (mul*n + add) / div with div dividing exactly on the domain."""

    mul: int
    add: int = 0
    div: int = 1

    def __post_init__(self) -> None:
        if self.mul < 1 or self.div < 1:
            raise ValueError("mul and div must be >= 1")

    def apply(self, n: int) -> int:
        value, rem = divmod(self.mul * n + self.add, self.div)
        if rem:
            raise ValueError(f"rule {self} does not divide at n={n}")
        return value

    def normalized(self) -> "AffineRule":
        g = gcd(self.mul, gcd(self.add, self.div)) if self.add else gcd(self.mul, self.div)
        if g <= 1:
            return self
        return AffineRule(self.mul // g, self.add // g, self.div // g)

    def is_identity(self) -> bool:
        return self.mul == self.div and self.add == 0


IDENTITY_RULE = AffineRule(1, 0, 1)

Branch = tuple[Progression, AffineRule]


def _image_progression(prog: Progression, rule: AffineRule) -> Progression:
    first = rule.apply(prog.start)
    step = rule.mul * prog.modulus // rule.div
    return Progression(first % step, step, first)


def _progressions_disjoint(p: Progression, q: Progression) -> bool:
    g = gcd(p.modulus, q.modulus)
    return p.residue % g != q.residue % g


@dataclass(frozen=True)
class StructuredPinj:
    """An exact partial injection: affine branches plus finite exceptions."""

    branches: tuple[Branch, ...] = ()
    exceptions: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "branches", tuple(sorted(self.branches)))
        object.__setattr__(self, "exceptions", tuple(sorted(self.exceptions)))
        for prog, rule in self.branches:
            if (rule.mul * prog.modulus) % rule.div:
                raise ValueError("div must divide mul*modulus on every branch")
            if rule.apply(prog.start) < 0:
                raise ValueError("branch image leaves the naturals")
        for n, v in self.exceptions:
            if n < 0 or v < 0:
                raise ValueError("exception points must be natural numbers")
        doms = [p for p, _ in self.branches]
        for i, p in enumerate(doms):
            for q in doms[i + 1 :]:
                if not _progressions_disjoint(p, q):
                    raise ValueError("branch domains overlap")
        points = [n for n, _ in self.exceptions]
        if len(set(points)) != len(points):
            raise ValueError("exception points repeat")
        for n in points:
            if any(n in p for p in doms):
                raise ValueError("exception point inside a branch domain")
        imgs = [_image_progression(p, r) for p, r in self.branches]
        for i, p in enumerate(imgs):
            for q in imgs[i + 1 :]:
                if not _progressions_disjoint(p, q):
                    raise ValueError("branch images overlap")
        values = [v for _, v in self.exceptions]
        if len(set(values)) != len(values):
            raise ValueError("exception values repeat")
        for v in values:
            if any(v in p for p in imgs):
                raise ValueError("exception value inside a branch image")

    @classmethod
    def identity(cls) -> "StructuredPinj":
        return cls(((NATURALS, IDENTITY_RULE),))

    @classmethod
    def identity_on(cls, prog: Progression, points: tuple[int, ...] = ()) -> "StructuredPinj":
        return cls(((prog, IDENTITY_RULE),), tuple((n, n) for n in points))

    @classmethod
    def from_rule(cls, rule: AffineRule, prog: Progression = NATURALS) -> "StructuredPinj":
        return cls(((prog, rule),))

    @classmethod
    def nowhere(cls) -> "StructuredPinj":
        return cls()

    # Left-to-right monoid interface shared with FiniteElement.
    def then(self, other: "StructuredPinj") -> "StructuredPinj":
        return compose(self, other)

    def inv(self) -> "StructuredPinj":
        return invert_pinj(self)

    def is_one(self) -> bool:
        return is_identity(self)

    def semantically_equals(self, other) -> bool:
        return isinstance(other, StructuredPinj) and equals(self, other)


def doubling() -> StructuredPinj:
    """n -> 2n on all naturals."""
    return StructuredPinj.from_rule(AffineRule(2, 0, 1))


def even_identity_with_one() -> StructuredPinj:
    """The identity on the even numbers together with the point 1."""
    return StructuredPinj.identity_on(Progression(0, 2, 0), (1,))


def successor() -> StructuredPinj:
    """n -> n + 1 on all naturals; realizes a bicyclic generator."""
    return StructuredPinj.from_rule(AffineRule(1, 1, 1))


def evaluate(f: StructuredPinj, n: int) -> int | None:
    for point, value in f.exceptions:
        if point == n:
            return value
    for prog, rule in f.branches:
        if n in prog:
            return rule.apply(n)
    return None


def _branch_compose(
    p1: Progression, r1: AffineRule, p2: Progression, r2: AffineRule
) -> Branch | None:
    """The branch {n in p1 : r1(n) in p2} with rule r2 after r1, or None.

    Values along p1 form the progression first + k*step (k >= 0); membership
    in p2 is a congruence on k solved by CRT, and the start bound lifts to a
    lower bound on k.
    """
    first = r1.apply(p1.start)
    step = r1.mul * p1.modulus // r1.div
    g = gcd(step, p2.modulus)
    if (p2.residue - first) % g:
        return None
    m = p2.modulus // g
    k0 = ((p2.residue - first) // g * pow(step // g, -1, m)) % m
    kmin = k0
    if first + k0 * step < p2.start:
        deficit = p2.start - (first + k0 * step)
        kmin = k0 + -(-deficit // (step * m)) * m
    modulus = p1.modulus * m
    dom = Progression(
        (p1.start + k0 * p1.modulus) % modulus, modulus, p1.start + kmin * p1.modulus
    )
    rule = AffineRule(
        r1.mul * r2.mul, r2.mul * r1.add + r2.add * r1.div, r1.div * r2.div
    ).normalized()
    return dom, rule


def _branch_preimage(prog: Progression, rule: AffineRule, value: int) -> int | None:
    n, rem = divmod(rule.div * value - rule.add, rule.mul)
    if rem or n not in prog:
        return None
    return n


def compose(f: StructuredPinj, g: StructuredPinj) -> StructuredPinj:
    """Exact left-to-right composite: n -> g(f(n)) where both sides defined.

    Branch-against-branch interactions go through CRT intersection; anything
    passing through an exception of either operand lands on the composite's
    finite exception list.
    """
    branches = []
    for p1, r1 in f.branches:
        for p2, r2 in g.branches:
            out = _branch_compose(p1, r1, p2, r2)
            if out is not None:
                branches.append(out)
    exceptions = []
    for n, v in f.exceptions:
        w = evaluate(g, v)
        if w is not None:
            exceptions.append((n, w))
    for point, value in g.exceptions:
        for p1, r1 in f.branches:
            n = _branch_preimage(p1, r1, point)
            if n is not None:
                exceptions.append((n, value))
    return StructuredPinj(tuple(branches), tuple(exceptions))


def invert_pinj(f: StructuredPinj) -> StructuredPinj:
    """Swap domain and range: each rule (p, q, d) becomes (d, -q, p)."""
    branches = tuple(
        (_image_progression(p, r), AffineRule(r.div, -r.add, r.mul).normalized())
        for p, r in f.branches
    )
    exceptions = tuple((v, n) for n, v in f.exceptions)
    return StructuredPinj(branches, exceptions)


def _comparison_frame(*maps: StructuredPinj) -> tuple[int, int]:
    modulus = 1
    threshold = 0
    for f in maps:
        for prog, _ in f.branches:
            modulus = lcm(modulus, prog.modulus)
            threshold = max(threshold, prog.start)
        for n, _ in f.exceptions:
            threshold = max(threshold, n + 1)
    return modulus, threshold


def _branch_for_class(f: StructuredPinj, residue: int) -> Branch | None:
    for prog, rule in f.branches:
        if residue % prog.modulus == prog.residue:
            return prog, rule
    return None


def _rules_agree(a: AffineRule, b: AffineRule) -> bool:
    return a.mul * b.div == b.mul * a.div and a.add * b.div == b.add * a.div


def equals(f: StructuredPinj, g: StructuredPinj) -> bool:
    """Semantic equality: same residue-class rules above a common threshold,
    same pointwise values below it."""
    modulus, threshold = _comparison_frame(f, g)
    for n in range(threshold):
        if evaluate(f, n) != evaluate(g, n):
            return False
    for residue in range(modulus):
        bf = _branch_for_class(f, residue)
        bg = _branch_for_class(g, residue)
        if (bf is None) != (bg is None):
            return False
        if bf is not None and not _rules_agree(bf[1], bg[1]):
            return False
    return True


def is_identity(f: StructuredPinj) -> bool:
    """True iff f fixes every natural number (total identity)."""
    modulus, threshold = _comparison_frame(f)
    for n in range(threshold):
        if evaluate(f, n) != n:
            return False
    for residue in range(modulus):
        branch = _branch_for_class(f, residue)
        if branch is None or not _rules_agree(branch[1], IDENTITY_RULE):
            return False
    return True


def domain_idempotent(f: StructuredPinj) -> StructuredPinj:
    """f f^-1: the identity on the domain of f."""
    return StructuredPinj(
        tuple((p, IDENTITY_RULE) for p, _ in f.branches),
        tuple((n, n) for n, _ in f.exceptions),
    )


def range_idempotent(f: StructuredPinj) -> StructuredPinj:
    """f^-1 f: the identity on the range of f."""
    return StructuredPinj(
        tuple((_image_progression(p, r), IDENTITY_RULE) for p, r in f.branches),
        tuple((v, v) for _, v in f.exceptions),
    )


@dataclass(frozen=True)
class Zmod:
    """The cyclic group of a given order as a finite inverse monoid carrier."""

    order: int

    def __post_init__(self) -> None:
        if self.order < 1:
            raise ValueError("order must be positive")

    def mult_index(self, i: int, j: int) -> int:
        return (i + j) % self.order

    def inverse_index(self, i: int) -> int:
        return -i % self.order

    @property
    def identity_index(self) -> int:
        return 0


@dataclass(frozen=True)
class FiniteElement:
    """An element of a finite inverse monoid carrier, by index."""

    carrier: object
    index: int

    def then(self, other: "FiniteElement") -> "FiniteElement":
        if self.carrier != other.carrier:
            raise ValueError("component shapes differ")
        return FiniteElement(self.carrier, self.carrier.mult_index(self.index, other.index))

    def inv(self) -> "FiniteElement":
        return FiniteElement(self.carrier, self.carrier.inverse_index(self.index))

    def is_one(self) -> bool:
        return self.index == self.carrier.identity_index

    def semantically_equals(self, other) -> bool:
        return (
            isinstance(other, FiniteElement)
            and self.carrier == other.carrier
            and self.index == other.index
        )


Component = StructuredPinj | FiniteElement


@dataclass(frozen=True)
class ProductElement:
    """A fixed-length tuple of components multiplied coordinatewise."""

    components: tuple[Component, ...]

    def then(self, other: "ProductElement") -> "ProductElement":
        if len(self.components) != len(other.components):
            raise ValueError("component shapes differ")
        out = []
        for a, b in zip(self.components, other.components):
            if type(a) is not type(b):
                raise ValueError("component shapes differ")
            out.append(a.then(b))
        return ProductElement(tuple(out))

    def inv(self) -> "ProductElement":
        return ProductElement(tuple(c.inv() for c in self.components))

    def is_one(self) -> bool:
        return all(c.is_one() for c in self.components)

    def domain_is_full(self) -> bool:
        return self.then(self.inv()).is_one()

    def range_is_full(self) -> bool:
        return self.inv().then(self).is_one()

    def semantically_equals(self, other: "ProductElement") -> bool:
        return len(self.components) == len(other.components) and all(
            a.semantically_equals(b)
            for a, b in zip(self.components, other.components)
        )

    def is_nowhere_defined(self) -> bool:
        return any(
            isinstance(c, StructuredPinj) and not c.branches and not c.exceptions
            for c in self.components
        )


class WitnessValidationError(SoundnessError):
    """A witness assignment failed relator validation."""


@dataclass(frozen=True)
class WitnessAssignment:
    """Generator images in a product monoid, validated against a presentation."""

    name: str
    presentation: Presentation
    images: dict[str, ProductElement] = field(compare=False)

    def image_of_letter(self, letter: Letter) -> ProductElement:
        value = self.images[self.presentation.alphabet.names[letter.gen]]
        return value if letter.sign > 0 else value.inv()

    def evaluate(self, word: Word) -> ProductElement:
        shape = next(iter(self.images.values()))
        out = _identity_like(shape)
        for l in word:
            out = out.then(self.image_of_letter(l))
        return out


def _identity_like(shape: ProductElement) -> ProductElement:
    comps = []
    for c in shape.components:
        if isinstance(c, StructuredPinj):
            comps.append(StructuredPinj.identity())
        else:
            comps.append(FiniteElement(c.carrier, c.carrier.identity_index))
    return ProductElement(tuple(comps))


def check_relators(presentation: Presentation, assignment: WitnessAssignment) -> bool:
    """True iff every relator maps to the identity in every component."""
    for name in presentation.alphabet.names:
        if name not in assignment.images:
            raise ValueError(f"assignment misses generator {name!r}")
    for r in presentation.relators:
        image = assignment.evaluate(r)
        if image.is_nowhere_defined():
            warnings.warn(
                f"witness {assignment.name!r} collapses a relator to the nowhere-defined map"
            )
        if not image.is_one():
            return False
    return True


def make_witness(
    name: str,
    presentation: Presentation,
    images: dict[str, ProductElement],
    require_valid: bool = True,
) -> WitnessAssignment:
    witness = WitnessAssignment(name, presentation, images)
    if require_valid and not check_relators(presentation, witness):
        raise WitnessValidationError(f"witness {name!r} does not satisfy the relators")
    return witness


def certify_non_left_invertible(assignment: WitnessAssignment, word: Word) -> bool:
    """True iff the image of ``word`` has a proper range in some component;
    sound because homomorphisms preserve left invertibility."""
    return not assignment.evaluate(word).range_is_full()


def certify_non_right_invertible(assignment: WitnessAssignment, word: Word) -> bool:
    """True iff the image of ``word`` has a proper domain in some component."""
    return not assignment.evaluate(word).domain_is_full()


def _role_map(word: Word) -> dict[Letter, str] | None:
    """Classify each signed letter as first/middle/last of the whole word.

    A letter and its formal inverse carry dual roles.  Returns None when the
    occurrences force conflicting roles.
    """
    dual = {"first": "last", "last": "first", "middle": "middle"}
    roles: dict[Letter, str] = {}

    def put(letter: Letter, role: str) -> bool:
        for l, r in ((letter, role), (letter.inverse(), dual[role])):
            if roles.setdefault(l, r) != r:
                return False
        return True

    for i, letter in enumerate(word):
        role = "first" if i == 0 else "last" if i == len(word) - 1 else "middle"
        if not put(letter, role):
            return None
    return roles


def _primitive_power(word: Word) -> tuple[Word, int]:
    """word = root^n with the shortest root."""
    n = len(word)
    for p in range(1, n + 1):
        if n % p == 0 and word == word[:p] * (n // p):
            return word[:p], n // p
    return word, 1


def _shift_cycle_witness(word: Word, presentation: Presentation) -> WitnessAssignment | None:
    """For relators (x1...xk)^n: first letter gets (successor, generator of
    Z_n), the last its inverse, middle letters the identity."""
    root, power = _primitive_power(word)
    if len(root) < 2:
        return None
    roles = _role_map(root)
    if roles is None:
        return None
    z = Zmod(power)
    values: dict[str, ProductElement] = {
        "first": ProductElement((successor(), FiniteElement(z, 1 % power))),
        "middle": ProductElement((StructuredPinj.identity(), FiniteElement(z, 0))),
        "last": ProductElement((successor().inv(), FiniteElement(z, 0))),
        "unused": ProductElement((StructuredPinj.identity(), FiniteElement(z, 0))),
    }
    images: dict[str, ProductElement] = {}
    for gen, name in enumerate(presentation.alphabet.names):
        pos, neg = Letter(gen, 1), Letter(gen, -1)
        if pos in roles:
            images[name] = values[roles[pos]]
        elif neg in roles:
            images[name] = values[roles[neg]].inv()
        else:
            images[name] = values["unused"]
    try:
        return make_witness(f"shift-counter-{power}", presentation, images)
    except WitnessValidationError:
        return None


def _doubling_classifier_witness(
    word: Word, presentation: Presentation
) -> WitnessAssignment | None:
    """First letter doubles, last halves, middle letters fix the even numbers
    together with 1; valid whenever the roles are consistent."""
    if len(word) < 2:
        return None
    roles = _role_map(word)
    if roles is None:
        return None
    values: dict[str, ProductElement] = {
        "first": ProductElement((doubling(),)),
        "middle": ProductElement((even_identity_with_one(),)),
        "last": ProductElement((doubling().inv(),)),
        "unused": ProductElement((StructuredPinj.identity(),)),
    }
    images: dict[str, ProductElement] = {}
    for gen, name in enumerate(presentation.alphabet.names):
        pos, neg = Letter(gen, 1), Letter(gen, -1)
        if pos in roles:
            images[name] = values[roles[pos]]
        elif neg in roles:
            images[name] = values[roles[neg]].inv()
        else:
            images[name] = values["unused"]
    try:
        return make_witness("doubling-classifier", presentation, images)
    except WitnessValidationError:
        return None


def builtin_witnesses(presentation: Presentation) -> list[WitnessAssignment]:
    """All built-in witness patterns whose relators validate, name-sorted."""
    out: dict[str, WitnessAssignment] = {}
    for relator in presentation.relators:
        for builder in (_shift_cycle_witness, _doubling_classifier_witness):
            witness = builder(relator, presentation)
            if witness is not None and witness.name not in out:
                out[witness.name] = witness
    return [out[k] for k in sorted(out)]


# ---------------------------------------------------------------------------
# Witness file format: one line per generator, e.g.
#   a -> pinj[ branch(r=0,m=1,s=0 : 2n+0/1) exc(3->5) ] x zmod(3, 1)

_BRANCH_RE = re.compile(
    r"branch\(r=(-?\d+),m=(\d+),s=(\d+)\s*:\s*(\d+)n([+-]\d+)/(\d+)\)"
)
_EXC_RE = re.compile(r"exc\((\d+)->(\d+)\)")
_ZMOD_RE = re.compile(r"^zmod\((\d+)\s*,\s*(\d+)\)$")


def _format_component(component: Component) -> str:
    if isinstance(component, FiniteElement):
        if not isinstance(component.carrier, Zmod):
            raise ValueError("only cyclic-group finite components serialize")
        return f"zmod({component.carrier.order}, {component.index})"
    parts = []
    for prog, rule in component.branches:
        parts.append(
            f"branch(r={prog.residue},m={prog.modulus},s={prog.start} : "
            f"{rule.mul}n{rule.add:+d}/{rule.div})"
        )
    for n, v in component.exceptions:
        parts.append(f"exc({n}->{v})")
    return "pinj[ " + " ".join(parts) + " ]"


def format_witness(assignment: WitnessAssignment) -> str:
    lines = []
    for name in assignment.presentation.alphabet.names:
        value = assignment.images[name]
        rendered = " x ".join(_format_component(c) for c in value.components)
        lines.append(f"{name} -> {rendered}")
    return "\n".join(lines) + "\n"


def _parse_component(text: str) -> Component:
    text = text.strip()
    m = _ZMOD_RE.match(text)
    if m:
        return FiniteElement(Zmod(int(m.group(1))), int(m.group(2)))
    if not (text.startswith("pinj[") and text.endswith("]")):
        raise ValueError(f"cannot parse component {text!r}")
    body = text[len("pinj[") : -1]
    branches = []
    for r, mmod, s, p, q, d in _BRANCH_RE.findall(body):
        branches.append(
            (Progression(int(r), int(mmod), int(s)), AffineRule(int(p), int(q), int(d)))
        )
    exceptions = [(int(n), int(v)) for n, v in _EXC_RE.findall(body)]
    leftovers = _EXC_RE.sub("", _BRANCH_RE.sub("", body)).strip()
    if leftovers:
        raise ValueError(f"unparsed witness fragment {leftovers!r}")
    return StructuredPinj(tuple(branches), tuple(exceptions))


def parse_witness_file(
    text: str, presentation: Presentation, name: str = "file"
) -> WitnessAssignment:
    """Parse the witness file format and validate against the presentation."""
    images: dict[str, ProductElement] = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        gen, arrow, value = line.partition("->")
        if not arrow:
            raise ValueError(f"bad witness line {line!r}")
        gen = gen.strip()
        components = tuple(_parse_component(c) for c in value.split(" x "))
        images[gen] = ProductElement(components)
    return make_witness(name, presentation, images)
