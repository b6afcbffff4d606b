"""Closed surface groups and Reidemeister-Schreier generators of cyclic covers.

Generators of the genus ``h`` surface group are indexed ``0 .. 2h-1`` in the
order a1, b1, a2, b2, ...; the relator is ``[a1,b1]...[ah,bh]`` with
``[x,y] = x y x^-1 y^-1``.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from math import gcd
from typing import Iterable, Sequence

from .errors import InvalidSpec


def generator_name(index: int) -> str:
    return f"{'ab'[index % 2]}{index // 2 + 1}"


def parse_generator_name(name: str) -> int:
    if len(name) < 2 or name[0] not in "ab" or not name[1:].isdigit() or int(name[1:]) < 1:
        raise ValueError(f"bad generator name {name!r}")
    return 2 * (int(name[1:]) - 1) + (name[0] == "b")


def _free_reduce(letters: Iterable[tuple[int, int]]) -> tuple[tuple[int, int], ...]:
    out: list[tuple[int, int]] = []
    for gen, exp in letters:
        if out and out[-1][0] == gen and out[-1][1] == -exp:
            out.pop()
        else:
            out.append((gen, exp))
    return tuple(out)


@dataclass(frozen=True)
class Word:
    """A freely reduced word; letters are ``(generator index, +1 or -1)``."""

    letters: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        letters = tuple((int(g), int(e)) for g, e in self.letters)
        for g, e in letters:
            if g < 0 or e not in (1, -1):
                raise ValueError(f"bad letter ({g}, {e})")
        object.__setattr__(self, "letters", _free_reduce(letters))

    @classmethod
    def generator(cls, index: int, exp: int = 1) -> "Word":
        if exp >= 0:
            return cls(((index, 1),) * exp)
        return cls(((index, -1),) * -exp)

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def __pow__(self, k: int) -> "Word":
        base = self if k >= 0 else self.inverse()
        return Word(base.letters * abs(k))

    def inverse(self) -> "Word":
        return Word(tuple((g, -e) for g, e in reversed(self.letters)))

    def __len__(self):
        return len(self.letters)

    def exponent_sum(self, gen: int) -> int:
        return sum(e for g, e in self.letters if g == gen)

    def exponent_sums(self, n_generators: int) -> list[int]:
        sums = [0] * n_generators
        for g, e in self.letters:
            sums[g] += e
        return sums

    def max_generator(self) -> int:
        return max((g for g, _ in self.letters), default=-1)

    def __str__(self):
        if not self.letters:
            return "1"
        return " ".join(generator_name(g) + ("" if e == 1 else "^-1") for g, e in self.letters)


def commutator(x: Word, y: Word) -> Word:
    return x * y * x.inverse() * y.inverse()


@dataclass(frozen=True)
class SurfacePresentation:
    genus: int
    relator: Word = field(init=False)

    def __post_init__(self):
        if self.genus < 1:
            raise ValueError("surface presentations need genus >= 1")
        rel = Word()
        for i in range(self.genus):
            rel = rel * commutator(Word.generator(2 * i), Word.generator(2 * i + 1))
        object.__setattr__(self, "relator", rel)

    @property
    def n_generators(self) -> int:
        return 2 * self.genus

    @property
    def generators(self) -> tuple[str, ...]:
        return tuple(generator_name(i) for i in range(self.n_generators))


@dataclass(frozen=True)
class CyclicCoverSpec:
    """A surjection ``h`` from a surface group onto ``Z/n``.

    ``images[i]`` is the residue of the i-th standard generator.
    """

    n: int
    images: tuple[int, ...]

    def __post_init__(self):
        if self.n < 1:
            raise InvalidSpec(f"cover degree must be >= 1, got {self.n}")
        images = tuple(int(x) % self.n for x in self.images)
        object.__setattr__(self, "images", images)
        if gcd(self.n, *images) != 1:
            raise InvalidSpec(f"images {images} do not generate Z/{self.n}")

    @classmethod
    def twisting(cls, n: int, generator: int, genus: int) -> "CyclicCoverSpec":
        """The cover sending one generator to 1 and the rest to 0."""
        if not 0 <= generator < 2 * genus:
            raise InvalidSpec(f"generator index {generator} out of range for genus {genus}")
        return cls(n, tuple(int(i == generator) for i in range(2 * genus)))

    def image_of(self, w: Word) -> int:
        return sum(self.images[g] * e for g, e in w.letters) % self.n

    def describe(self) -> str:
        nonzero = [f"{generator_name(i)}->{x}" for i, x in enumerate(self.images) if x]
        return f"degree {self.n} cover ({', '.join(nonzero) or 'trivial'})"


def cover_genus(n: int, b: int) -> int:
    """Base genus of an ``n``-fold unramified cover of a genus ``b`` surface."""
    if n < 1 or b < 1:
        raise ValueError("cover_genus needs n >= 1 and b >= 1")
    return n * (b - 1) + 1


def _check_spec(pres: SurfacePresentation, spec: CyclicCoverSpec):
    if len(spec.images) != pres.n_generators:
        raise InvalidSpec(
            f"spec has {len(spec.images)} images, presentation has {pres.n_generators} generators")
    assert spec.image_of(pres.relator) == 0


def schreier_transversal(pres: SurfacePresentation, spec: CyclicCoverSpec) -> list[Word]:
    """Prefix-closed coset representatives, listed in transversal order.

    When some generator ``t`` maps to a unit the transversal is ``t^0 .. t^(n-1)``
    for the first such generator; otherwise a breadth-first spanning tree of the
    coset graph is used.
    """
    _check_spec(pres, spec)
    n = spec.n
    for t, img in enumerate(spec.images):
        if gcd(img, n) == 1:
            return [Word.generator(t, k) for k in range(n)]

    reps: dict[int, Word] = {0: Word()}
    queue = deque([0])
    while queue:
        r = queue.popleft()
        for x, img in enumerate(spec.images):
            for e in (1, -1):
                nxt = (r + e * img) % n
                if nxt not in reps:
                    reps[nxt] = reps[r] * Word.generator(x, e)
                    queue.append(nxt)
    return [reps[r] for r in sorted(reps)]


def schreier_generators(pres: SurfacePresentation, spec: CyclicCoverSpec) -> list[Word]:
    """Generators of ``ker(h)`` as words in the ambient generators.

    One word ``rep(c) x rep(c.x)^-1`` per coset ``c`` and generator ``x``; the
    ``n-1`` words that reduce to the empty word are dropped, leaving
    ``2*genus*n - n + 1`` generators.
    """
    transversal = schreier_transversal(pres, spec)
    rep_of = {spec.image_of(w): w for w in transversal}
    out = []
    for w in transversal:
        c = spec.image_of(w)
        for x, img in enumerate(spec.images):
            s = w * Word.generator(x) * rep_of[(c + img) % spec.n].inverse()
            if s.letters:
                out.append(s)
    return out


def abelianized(words: Sequence[Word], n_generators: int) -> list[list[int]]:
    """Exponent-sum vectors of ``words``, one per word."""
    return [w.exponent_sums(n_generators) for w in words]
