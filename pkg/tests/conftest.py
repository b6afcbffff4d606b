import random
from pathlib import Path

import pytest

from kodfib.linalg import IntMatrix
from kodfib.monodromy import SymplecticRep, symplectic_form, symplectic_inverse

DATA = Path(__file__).parent / "data"

# acceptance lines collected by test_acceptance, printed at the end of the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


def transvection(v) -> IntMatrix:
    """x -> x + <v, x> v, always symplectic."""
    n = len(v)
    J = symplectic_form(n // 2)
    vJ = [sum(v[k] * J[k, j] for k in range(n)) for j in range(n)]
    return IntMatrix.identity(n) + IntMatrix([[v[i] * vJ[j] for j in range(n)] for i in range(n)])


def random_symplectic(rng: random.Random, g: int, factors: int = 3) -> IntMatrix:
    M = IntMatrix.identity(2 * g)
    for _ in range(factors):
        v = [rng.choice((-1, 0, 0, 1)) for _ in range(2 * g)]
        if any(v):
            T = transvection(v)
            M = M @ (T if rng.random() < 0.5 else symplectic_inverse(T))
    return M


def random_rep(rng: random.Random, g: int, b: int) -> SymplecticRep:
    """A rep satisfying the surface relator.

    Handles get commuting pairs (M, M^k) or (M, I); with two handles left
    a swapped pair [A, B][B, A] gives a non-abelian image.
    """
    images = []
    i = 0
    while i < b:
        if b - i >= 2 and rng.random() < 0.4:
            A, B = random_symplectic(rng, g), random_symplectic(rng, g)
            images += [A, B, B, A]
            i += 2
            continue
        M = random_symplectic(rng, g)
        kind = rng.randrange(3)
        if kind == 0:
            images += [M, IntMatrix.identity(2 * g)]
        elif kind == 1:
            images += [IntMatrix.identity(2 * g), M]
        else:
            images += [M, M ** rng.randrange(0, 3)]
        i += 1
    return SymplecticRep(g, b, tuple(images))


@pytest.fixture
def rng():
    return random.Random(20261016)
