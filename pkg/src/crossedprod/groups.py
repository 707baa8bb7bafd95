"""Group engines: canonical normal forms, word length, deterministic balls.

Supported groups: the integers Z, lattices Z^d, cyclic groups C_n, free
groups F_k, and finite direct products of these.  Elements are plain Python
payloads in canonical normal form:

* ``Z`` and ``C_n``: ``int`` (``C_n`` reduced mod n),
* ``Z^d``: tuple of d ints,
* ``F_k``: tuple of nonzero signed generator indices, freely reduced
  (``1..k`` generators, negative for inverses),
* products: tuple of factor payloads.

Ball enumeration is length-lexicographic under the fixed generator order
a1 < a1^-1 < a2 < a2^-1 < ...  The scheme is versioned (ORDERING_VERSION)
so serialized matrices can detect an ordering change.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, List, Tuple, Union

from ._core import free_ball_words, free_mul
from .errors import ConfigError, ResourceCapError, SpecMismatchError

Element = Union[int, tuple]

ORDERING_VERSION = "llex-1"
DEFAULT_ELEMENT_CAP = 10**6


class GroupSpec:
    """Base class for group descriptions.

    Subclasses provide the group law on canonical payloads, the word
    length for the standard symmetric generating set, and a canonical
    geodesic word used as the length-lex sort key.
    """

    label: str

    def identity(self) -> Element:
        raise NotImplementedError

    def multiply(self, a: Element, b: Element) -> Element:
        raise NotImplementedError

    def inverse(self, a: Element) -> Element:
        raise NotImplementedError

    def word_length(self, a: Element) -> int:
        raise NotImplementedError

    def validate(self, a: Element) -> Element:
        """Return the payload if it is in canonical form, else raise."""
        raise NotImplementedError

    def generating_set(self) -> Tuple[Element, ...]:
        """Standard symmetric generators in the fixed enumeration order."""
        raise NotImplementedError

    def is_finite(self) -> bool:
        return False

    def order(self) -> int:
        raise SpecMismatchError(f"{self.label} is infinite")

    def diameter(self) -> int:
        raise SpecMismatchError(f"{self.label} is infinite")

    def _letter_key(self, a: Element) -> Tuple[int, ...]:
        """Canonical geodesic word of ``a`` as generator order indices."""
        raise NotImplementedError

    def sort_key(self, a: Element):
        k = self._letter_key(a)
        return (len(k), k)

    def _enumerate_ball(self, n: int, cap: int) -> List[Element]:
        raise NotImplementedError

    def parse_element(self, text: str) -> Element:
        raise NotImplementedError

    def format_element(self, a: Element) -> str:
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}({self.label!r})"


def _as_int(text: str) -> int:
    try:
        return int(text.strip())
    except ValueError:
        raise ConfigError(f"expected an integer, got {text!r}") from None


@dataclass(frozen=True, repr=False)
class Integers(GroupSpec):
    """The group Z with generators {+1, -1}."""

    @property
    def label(self):
        return "Z"

    def identity(self):
        return 0

    def multiply(self, a, b):
        return self.validate(a) + self.validate(b)

    def inverse(self, a):
        return -self.validate(a)

    def word_length(self, a):
        return abs(self.validate(a))

    def validate(self, a):
        if isinstance(a, bool) or not isinstance(a, int):
            raise SpecMismatchError(f"not an integer payload: {a!r}")
        return a

    def generating_set(self):
        return (1, -1)

    def _letter_key(self, a):
        return (0,) * a if a >= 0 else (1,) * (-a)

    def _enumerate_ball(self, n, cap):
        if 2 * n + 1 > cap:
            raise ResourceCapError(f"ball of Z at radius {n} exceeds cap {cap}")
        out = [0]
        for j in range(1, n + 1):
            out.append(j)
            out.append(-j)
        return out

    def parse_element(self, text):
        return _as_int(text)

    def format_element(self, a):
        return str(a)


@dataclass(frozen=True, repr=False)
class IntegerLattice(GroupSpec):
    """Z^d with the standard generators, word length = l1 norm."""

    d: int

    def __post_init__(self):
        if self.d < 1:
            raise ConfigError(f"lattice dimension must be >= 1, got {self.d}")

    @property
    def label(self):
        return f"Z^{self.d}"

    def identity(self):
        return (0,) * self.d

    def multiply(self, a, b):
        a = self.validate(a)
        b = self.validate(b)
        return tuple(x + y for x, y in zip(a, b))

    def inverse(self, a):
        return tuple(-x for x in self.validate(a))

    def word_length(self, a):
        return sum(abs(x) for x in self.validate(a))

    def validate(self, a):
        if (
            not isinstance(a, tuple)
            or len(a) != self.d
            or not all(isinstance(x, int) and not isinstance(x, bool) for x in a)
        ):
            raise SpecMismatchError(f"not a Z^{self.d} payload: {a!r}")
        return a

    def generating_set(self):
        gens = []
        for i in range(self.d):
            e = [0] * self.d
            e[i] = 1
            gens.append(tuple(e))
            e[i] = -1
            gens.append(tuple(e))
        return tuple(gens)

    def _letter_key(self, a):
        key = []
        for i, x in enumerate(a):
            key.extend([2 * i if x >= 0 else 2 * i + 1] * abs(x))
        return tuple(key)

    def _enumerate_ball(self, n, cap):
        out = []
        for v in itertools.product(range(-n, n + 1), repeat=self.d):
            if sum(abs(x) for x in v) <= n:
                out.append(v)
                if len(out) > cap:
                    raise ResourceCapError(
                        f"ball of Z^{self.d} at radius {n} exceeds cap {cap}"
                    )
        out.sort(key=self.sort_key)
        return out

    def parse_element(self, text):
        parts = _split_components(text)
        if len(parts) != self.d:
            raise ConfigError(f"expected {self.d} coordinates, got {text!r}")
        return tuple(_as_int(p) for p in parts)

    def format_element(self, a):
        return "(" + ",".join(str(x) for x in a) + ")"


@dataclass(frozen=True, repr=False)
class Cyclic(GroupSpec):
    """C_n = Z/nZ; payloads reduced to {0..n-1}, length min(j, n-j)."""

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ConfigError(f"cyclic order must be >= 1, got {self.n}")

    @property
    def label(self):
        return f"C{self.n}"

    def identity(self):
        return 0

    def multiply(self, a, b):
        return (self.validate(a) + self.validate(b)) % self.n

    def inverse(self, a):
        return (-self.validate(a)) % self.n

    def word_length(self, a):
        a = self.validate(a)
        return min(a, self.n - a) if a else 0

    def validate(self, a):
        if isinstance(a, bool) or not isinstance(a, int) or not 0 <= a < self.n:
            raise SpecMismatchError(f"not a C{self.n} payload: {a!r}")
        return a

    def generating_set(self):
        if self.n == 1:
            return ()
        if self.n == 2:
            return (1,)
        return (1, self.n - 1)

    def is_finite(self):
        return True

    def order(self):
        return self.n

    def diameter(self):
        return self.n // 2

    def _letter_key(self, a):
        # ties (n even, a = n/2) resolve to the positive word
        if a <= self.n - a:
            return (0,) * a
        return (1,) * (self.n - a)

    def _enumerate_ball(self, n, cap):
        if self.n > cap:
            raise ResourceCapError(f"C{self.n} exceeds cap {cap}")
        out = [j for j in range(self.n) if self.word_length(j) <= n]
        out.sort(key=self.sort_key)
        return out

    def parse_element(self, text):
        return _as_int(text) % self.n

    def format_element(self, a):
        return str(a)


@dataclass(frozen=True, repr=False)
class FreeGroup(GroupSpec):
    """F_k on letters a, b, c, ...; payloads are reduced signed-index words."""

    k: int

    def __post_init__(self):
        if not 1 <= self.k <= 26:
            raise ConfigError(f"free rank must be in 1..26, got {self.k}")

    @property
    def label(self):
        return f"F{self.k}"

    def identity(self):
        return ()

    def multiply(self, a, b):
        return free_mul(self.validate(a), self.validate(b))

    def inverse(self, a):
        return tuple(-v for v in reversed(self.validate(a)))

    def word_length(self, a):
        return len(self.validate(a))

    def validate(self, a):
        if not isinstance(a, tuple):
            raise SpecMismatchError(f"not a word payload: {a!r}")
        for i, v in enumerate(a):
            if not isinstance(v, int) or v == 0 or abs(v) > self.k:
                raise SpecMismatchError(f"letter {v!r} outside F{self.k}")
            if i and a[i - 1] == -v:
                raise SpecMismatchError(f"word not reduced at position {i}: {a!r}")
        return a

    def generating_set(self):
        gens = []
        for i in range(1, self.k + 1):
            gens.append((i,))
            gens.append((-i,))
        return tuple(gens)

    def _letter_key(self, a):
        return tuple(2 * (abs(v) - 1) + (1 if v < 0 else 0) for v in a)

    def _enumerate_ball(self, n, cap):
        # free_ball_words already emits length-lex order
        return free_ball_words(self.k, n, cap)

    def parse_element(self, text):
        text = text.strip()
        if text in ("e", ""):
            return ()
        word = ()
        for ch in text:
            if "a" <= ch <= "z":
                v = ord(ch) - ord("a") + 1
            elif "A" <= ch <= "Z":
                v = -(ord(ch) - ord("A") + 1)
            else:
                raise ConfigError(f"bad letter {ch!r} in word {text!r}")
            if abs(v) > self.k:
                raise ConfigError(f"letter {ch!r} outside F{self.k}")
            word = free_mul(word, (v,))
        return word

    def format_element(self, a):
        if not a:
            return "e"
        out = []
        for v in a:
            ch = chr(ord("a") + abs(v) - 1)
            out.append(ch.upper() if v < 0 else ch)
        return "".join(out)


@dataclass(frozen=True, repr=False)
class ProductGroup(GroupSpec):
    """Finite direct product; word length is the sum over factors."""

    factors: Tuple[GroupSpec, ...]

    def __post_init__(self):
        if len(self.factors) < 2:
            raise ConfigError("product needs at least two factors")

    @property
    def label(self):
        return "x".join(f.label for f in self.factors)

    def identity(self):
        return tuple(f.identity() for f in self.factors)

    def multiply(self, a, b):
        a = self.validate(a)
        b = self.validate(b)
        return tuple(f.multiply(x, y) for f, x, y in zip(self.factors, a, b))

    def inverse(self, a):
        return tuple(f.inverse(x) for f, x in zip(self.factors, self.validate(a)))

    def word_length(self, a):
        return sum(f.word_length(x) for f, x in zip(self.factors, self.validate(a)))

    def validate(self, a):
        if not isinstance(a, tuple) or len(a) != len(self.factors):
            raise SpecMismatchError(f"not a {self.label} payload: {a!r}")
        for f, x in zip(self.factors, a):
            f.validate(x)
        return a

    def generating_set(self):
        gens = []
        for i, f in enumerate(self.factors):
            for s in f.generating_set():
                e = list(self.identity())
                e[i] = s
                gens.append(tuple(e))
        return tuple(gens)

    def is_finite(self):
        return all(f.is_finite() for f in self.factors)

    def order(self):
        out = 1
        for f in self.factors:
            out *= f.order()
        return out

    def diameter(self):
        return sum(f.diameter() for f in self.factors)

    def _letter_key(self, a):
        key = []
        offset = 0
        for f, x in zip(self.factors, a):
            key.extend(offset + i for i in f._letter_key(x))
            offset += len(f.generating_set())
        return tuple(key)

    def _enumerate_ball(self, n, cap):
        factor_balls = [f._enumerate_ball(n, cap) for f in self.factors]
        out = []
        for combo in itertools.product(*factor_balls):
            if self.word_length(combo) <= n:
                out.append(combo)
                if len(out) > cap:
                    raise ResourceCapError(
                        f"ball of {self.label} at radius {n} exceeds cap {cap}"
                    )
        out.sort(key=self.sort_key)
        return out

    def parse_element(self, text):
        parts = _split_components(text)
        if len(parts) != len(self.factors):
            raise ConfigError(f"expected {len(self.factors)} components, got {text!r}")
        return tuple(f.parse_element(p) for f, p in zip(self.factors, parts))

    def format_element(self, a):
        return "(" + ",".join(f.format_element(x) for f, x in zip(self.factors, a)) + ")"


def _split_components(text: str) -> List[str]:
    """Split on top-level commas, honoring one level of parentheses."""
    text = text.strip()
    if text.startswith("(") and text.endswith(")"):
        text = text[1:-1]
    parts = []
    depth = 0
    cur = []
    for ch in text:
        if ch == "(":
            depth += 1
            cur.append(ch)
        elif ch == ")":
            depth -= 1
            cur.append(ch)
        elif ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return parts


def parse_group(text: str) -> GroupSpec:
    """Parse a group label: Z, Z^d, Cn, Fk, or products like ZxC3."""
    parts = [p.strip() for p in text.replace("*", "x").split("x")]
    specs = []
    for part in parts:
        if part == "Z":
            specs.append(Integers())
        elif part.startswith("Z^"):
            specs.append(IntegerLattice(_as_int(part[2:])))
        elif part.startswith("C"):
            specs.append(Cyclic(_as_int(part[1:])))
        elif part.startswith("F"):
            specs.append(FreeGroup(_as_int(part[1:])))
        else:
            raise ConfigError(f"unrecognized group {part!r} in {text!r}")
    if len(specs) == 1:
        return specs[0]
    return ProductGroup(tuple(specs))


@dataclass(frozen=True)
class Ball:
    """All elements of word length <= radius, in the fixed length-lex order.

    elements[0] is always the identity; index_of inverts positional lookup.
    """

    spec: GroupSpec
    radius: int
    elements: Tuple[Element, ...]
    index_of: Dict[Element, int]

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, g):
        return g in self.index_of

    def __getitem__(self, i: int) -> Element:
        return self.elements[i]

    def index(self, g: Element) -> int:
        try:
            return self.index_of[g]
        except KeyError:
            raise SpecMismatchError(
                f"{self.spec.format_element(g)} outside radius-{self.radius} ball"
            ) from None


def ball(spec: GroupSpec, n: int, cap: int = DEFAULT_ELEMENT_CAP) -> Ball:
    if n < 0:
        raise ConfigError(f"ball radius must be >= 0, got {n}")
    elems = tuple(spec._enumerate_ball(n, cap))
    return Ball(spec, n, elems, {g: i for i, g in enumerate(elems)})


def sphere(spec: GroupSpec, n: int, cap: int = DEFAULT_ELEMENT_CAP) -> List[Element]:
    return [g for g in ball(spec, n, cap) if spec.word_length(g) == n]


def multiply(spec: GroupSpec, a: Element, b: Element) -> Element:
    return spec.multiply(a, b)


def inverse(spec: GroupSpec, a: Element) -> Element:
    return spec.inverse(a)


def word_length(spec: GroupSpec, a: Element) -> int:
    return spec.word_length(a)


def whole_group_ball(spec: GroupSpec, cap: int = DEFAULT_ELEMENT_CAP) -> Ball:
    """The full group as a ball; finite groups only."""
    if not spec.is_finite():
        raise SpecMismatchError(f"{spec.label} is infinite; pick a radius")
    return ball(spec, spec.diameter(), cap)
