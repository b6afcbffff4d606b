"""Homological monodromy of surface bundles and the block construction calculus.

A bundle with fiber genus ``g`` over a genus ``b`` base is recorded by the
action of the 2b standard base generators on ``H_1(fiber) = Z^2g``. Bundles
whose monodromy is only known through invariants are carried as
:class:`DeclaredBlock` values, and their coinvariant rank propagates as an
interval.

Symplectic form: ``J`` is block diagonal with one ``[[0, 1], [-1, 0]]`` per
handle, so section sums are literally block-diagonal sums.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

from .errors import (BaseMismatch, DeclaredBlockUnsupported, MissingSection,
                     RelatorViolation, ShapeError, SymplecticViolation,
                     UnsupportedOperation)
from .linalg import IntMatrix, cokernel_structure
from .surface import (CyclicCoverSpec, SurfacePresentation, Word, cover_genus,
                      generator_name, schreier_generators)

TREFOIL_MONODROMY = IntMatrix([[1, 1], [-1, 0]])
KODAIRA_THURSTON_MONODROMY = IntMatrix([[1, 1], [0, 1]])

# EKKOS bundle: genus 3 fiber over genus 9, signature 4, zero-square section
EKKOS_FIBER_GENUS = 3
EKKOS_BASE_GENUS = 9
EKKOS_SIGNATURE = 4
EKKOS_RANK_INTERVAL = (0, 5)


def symplectic_form(g: int) -> IntMatrix:
    return IntMatrix.block_diag(*[IntMatrix([[0, 1], [-1, 0]])] * g) if g else IntMatrix.zeros(0, 0)


def is_symplectic(M: IntMatrix) -> bool:
    if not M.is_square() or M.rows % 2:
        return False
    J = symplectic_form(M.rows // 2)
    return M.T @ J @ M == J


def symplectic_inverse(M: IntMatrix) -> IntMatrix:
    """``M^-1 = -J M^T J`` for symplectic ``M``."""
    J = symplectic_form(M.rows // 2)
    return -(J @ M.T @ J)


def _check_square(images: Sequence[IntMatrix], g: int):
    for i, M in enumerate(images):
        if not isinstance(M, IntMatrix):
            raise ShapeError(f"image {i} is not an IntMatrix")
        if M.shape != (2 * g, 2 * g):
            raise ShapeError(f"image {i} has shape {M.shape}, expected {(2 * g, 2 * g)}")


@dataclass(frozen=True)
class SymplecticRep:
    """One ``2g x 2g`` image per standard generator a1, b1, ..., ab, bb."""

    fiber_genus: int
    base_genus: int
    images: tuple[IntMatrix, ...]

    def __post_init__(self):
        object.__setattr__(self, "images", tuple(self.images))
        if self.fiber_genus < 1 or self.base_genus < 1:
            raise ShapeError("fiber and base genus must be >= 1")
        if len(self.images) != 2 * self.base_genus:
            raise ShapeError(
                f"{len(self.images)} images for base genus {self.base_genus}, "
                f"expected {2 * self.base_genus}")
        _check_square(self.images, self.fiber_genus)

    @classmethod
    def trivial(cls, g: int, b: int) -> "SymplecticRep":
        return cls(g, b, (IntMatrix.identity(2 * g),) * (2 * b))

    def relator_value(self) -> IntMatrix:
        return evaluate_word(self, SurfacePresentation(self.base_genus).relator)


@dataclass(frozen=True)
class GeneratingSetRep:
    """Images of a generating set of a finite-index subgroup of the base group.

    No relator constraint applies; validity is inherited from the bundle the
    subgroup was restricted from.
    """

    fiber_genus: int
    base_genus: int
    images: tuple[IntMatrix, ...]
    origin: str = ""
    inherited_validity: bool = True

    def __post_init__(self):
        object.__setattr__(self, "images", tuple(self.images))
        _check_square(self.images, self.fiber_genus)


@dataclass(frozen=True)
class DeclaredBlock:
    """A bundle known only through its genera and a coinvariant rank interval.

    ``rank_parity`` (0, 1 or None) further restricts the admissible ranks.
    """

    fiber_genus: int
    base_genus: int
    rank_lo: int
    rank_hi: int
    rank_parity: int | None = None

    def __post_init__(self):
        if not 0 <= self.rank_lo <= self.rank_hi <= 2 * self.fiber_genus:
            raise ShapeError(
                f"rank interval [{self.rank_lo}, {self.rank_hi}] not inside [0, {2 * self.fiber_genus}]")
        if self.rank_parity not in (None, 0, 1):
            raise ValueError("rank_parity must be 0, 1 or None")
        if not self.candidate_ranks():
            raise ShapeError("no rank in the interval has the declared parity")

    @property
    def rank_interval(self) -> tuple[int, int]:
        return self.rank_lo, self.rank_hi

    def candidate_ranks(self) -> list[int]:
        return [r for r in range(self.rank_lo, self.rank_hi + 1)
                if self.rank_parity is None or r % 2 == self.rank_parity]


Content = Union[SymplecticRep, GeneratingSetRep, DeclaredBlock]
Signature = Union[int, tuple, None]


@dataclass(frozen=True)
class Provenance:
    """Construction tree. Leaves of kind explicit/declared/generating_set carry their content."""

    op: str
    args: tuple[tuple[str, object], ...] = ()
    children: tuple["Provenance", ...] = ()
    leaf: object = None

    def leaf_count(self) -> int:
        if not self.children:
            return 1
        return sum(c.leaf_count() for c in self.children)

    def arg(self, key: str, default=None):
        return dict(self.args).get(key, default)

    def render(self) -> str:
        inner = [f"{k}={v}" for k, v in self.args] + [c.render() for c in self.children]
        return f"{self.op}({', '.join(inner)})"


def _normalize_signature(sig) -> Signature:
    if sig is None or isinstance(sig, int):
        return sig
    lo, hi = sig
    if lo > hi:
        raise ValueError(f"empty signature interval {sig}")
    return lo if lo == hi else (int(lo), int(hi))


def _signature_bounds(sig: Signature):
    if sig is None:
        return None
    if isinstance(sig, int):
        return sig, sig
    return sig


@dataclass(frozen=True)
class BundleSpec:
    content: Content
    signature: Signature
    has_zero_section: bool
    provenance: Provenance

    def __post_init__(self):
        object.__setattr__(self, "signature", _normalize_signature(self.signature))

    @property
    def fiber_genus(self) -> int:
        return self.content.fiber_genus

    @property
    def base_genus(self) -> int:
        return self.content.base_genus

    @property
    def is_declared(self) -> bool:
        return isinstance(self.content, DeclaredBlock)

    @property
    def rep(self) -> SymplecticRep:
        if not isinstance(self.content, SymplecticRep):
            raise UnsupportedOperation(f"{self.provenance.op} bundle has no standard-presentation rep")
        return self.content

    @property
    def signature_bounds(self):
        return _signature_bounds(self.signature)


# validation

@dataclass(frozen=True)
class ValidationFailure:
    kind: str  # "symplectic" | "determinant" | "relator"
    generator: int | None
    message: str


@dataclass(frozen=True)
class ValidationReport:
    failures: tuple[ValidationFailure, ...]

    @property
    def ok(self) -> bool:
        return not self.failures

    def raise_for_failures(self):
        for f in self.failures:
            if f.kind == "relator":
                raise RelatorViolation(f.message)
            raise SymplecticViolation(f.message)


def validate_rep(rep: SymplecticRep | GeneratingSetRep) -> ValidationReport:
    """Check symplecticity, determinant and (for standard reps) the surface relator."""
    failures = []
    for i, M in enumerate(rep.images):
        name = generator_name(i) if isinstance(rep, SymplecticRep) else f"#{i}"
        if not is_symplectic(M):
            failures.append(ValidationFailure(
                "symplectic", i, f"image of {name} does not preserve the symplectic form"))
        d = M.det()
        if d != 1:
            failures.append(ValidationFailure(
                "determinant", i, f"image of {name} has determinant {d}"))
    if isinstance(rep, SymplecticRep) and not failures:
        value = rep.relator_value()
        if not value.is_identity():
            failures.append(ValidationFailure(
                "relator", None, "product of commutators [a_i, b_i] is not the identity"))
    return ValidationReport(tuple(failures))


# coinvariants

@dataclass(frozen=True)
class CoinvariantsReport:
    fiber_genus: int
    base_genus: int
    rank: int
    torsion: tuple[int, ...]

    @property
    def s(self) -> int | None:
        return self.fiber_genus - self.rank // 2 if self.rank % 2 == 0 else None

    @property
    def q_f(self) -> int | None:
        return self.rank // 2 if self.rank % 2 == 0 else None

    @property
    def b1(self) -> int:
        return 2 * self.base_genus + self.rank


def coinvariants(images: Sequence[IntMatrix], g: int, b_for_report: int) -> CoinvariantsReport:
    """``Z^2g`` modulo the span of the columns of ``M - I`` over all images."""
    identity = IntMatrix.identity(2 * g)
    relations = IntMatrix.hstack([M - identity for M in images], rows=2 * g)
    free, torsion = cokernel_structure(relations)
    return CoinvariantsReport(g, b_for_report, free, tuple(torsion))


def bundle_coinvariants(bundle: BundleSpec) -> CoinvariantsReport:
    if bundle.is_declared:
        raise DeclaredBlockUnsupported("declared blocks only carry a rank interval")
    return coinvariants(bundle.content.images, bundle.fiber_genus, bundle.base_genus)


def candidate_ranks(bundle: BundleSpec) -> list[int]:
    """All coinvariant ranks compatible with what is known about ``bundle``."""
    if bundle.is_declared:
        return bundle.content.candidate_ranks()
    return [bundle_coinvariants(bundle).rank]


def evaluate_word(rep: SymplecticRep, w: Word) -> IntMatrix:
    if w.max_generator() >= len(rep.images):
        raise IndexError(f"word {w} uses a generator outside base genus {rep.base_genus}")
    result = IntMatrix.identity(2 * rep.fiber_genus)
    inverses: dict[int, IntMatrix] = {}
    for gen, exp in w.letters:
        if exp == 1:
            M = rep.images[gen]
        else:
            if gen not in inverses:
                inverses[gen] = symplectic_inverse(rep.images[gen])
            M = inverses[gen]
        result = result @ M
    return result


# building blocks

def _leaf_args(content, signature, has_zero_section) -> tuple:
    return (("g", content.fiber_genus), ("b", content.base_genus),
            ("signature", _normalize_signature(signature)), ("has_zero_section", bool(has_zero_section)))


def explicit_bundle(rep: SymplecticRep, signature: Signature = None,
                    has_zero_section: bool = False) -> BundleSpec:
    """Wrap a user-supplied rep; its invariants are checked here."""
    validate_rep(rep).raise_for_failures()
    return BundleSpec(rep, signature, has_zero_section,
                      Provenance("explicit", _leaf_args(rep, signature, has_zero_section), leaf=rep))


def declared_bundle(block: DeclaredBlock, signature: Signature,
                    has_zero_section: bool) -> BundleSpec:
    return BundleSpec(block, signature, has_zero_section,
                      Provenance("declared", _leaf_args(block, signature, has_zero_section), leaf=block))


def generating_set_bundle(rep: GeneratingSetRep, signature: Signature = None,
                          has_zero_section: bool = False) -> BundleSpec:
    validate_rep(rep).raise_for_failures()
    return BundleSpec(rep, signature, has_zero_section,
                      Provenance("generating_set", _leaf_args(rep, signature, has_zero_section), leaf=rep))


def _single_generator_block(M: IntMatrix, b: int) -> SymplecticRep:
    g = M.rows // 2
    identity = IntMatrix.identity(2 * g)
    return SymplecticRep(g, b, (M,) + (identity,) * (2 * b - 1))


def product_block(g: int, b: int) -> BundleSpec:
    """The product bundle: trivial monodromy, signature 0."""
    if g < 1 or b < 1:
        raise ValueError("product_block needs g >= 1 and b >= 1")
    rep = SymplecticRep.trivial(g, b)
    return BundleSpec(rep, 0, True, Provenance("product", (("g", g), ("b", b))))


def trefoil_block(b: int) -> BundleSpec:
    """Torus bundle from 0-surgery on the trefoil, fiber summed up to base genus ``b``.

    a1 acts by the order-6 trefoil monodromy, everything else trivially.
    """
    if b < 1:
        raise ValueError("trefoil_block needs b >= 1")
    rep = _single_generator_block(TREFOIL_MONODROMY, b)
    validate_rep(rep).raise_for_failures()
    return BundleSpec(rep, 0, True, Provenance("trefoil", (("b", b),)))


def kodaira_thurston_q(b: int) -> BundleSpec:
    """Kodaira-Thurston torus bundle fiber summed up to base genus ``b``.

    Its coinvariant rank is 1, so it flips parity in a section sum. Note the
    first Betti number comes out as ``2b + 1`` (19 for ``b = 9``).
    """
    if b < 1:
        raise ValueError("kodaira_thurston_q needs b >= 1")
    rep = _single_generator_block(KODAIRA_THURSTON_MONODROMY, b)
    validate_rep(rep).raise_for_failures()
    return BundleSpec(rep, 0, True, Provenance("kodaira_thurston", (("b", b),)))


def declared_ekkos(parity: str | None = None) -> BundleSpec:
    """The genus 3 over genus 9 bundle with signature 4, as a declared block.

    ``parity`` ("even"/"odd") narrows the rank interval to one branch of the
    parity repair; the monodromy itself is never available.
    """
    lo, hi = EKKOS_RANK_INTERVAL
    p = _parity_value(parity)
    if p is not None:
        lo += (lo - p) % 2
        hi -= (hi - p) % 2
    block = DeclaredBlock(EKKOS_FIBER_GENUS, EKKOS_BASE_GENUS, lo, hi, p)
    args = (("parity", parity),) if parity else ()
    return BundleSpec(block, EKKOS_SIGNATURE, True, Provenance("ekkos", args))


def _parity_value(parity: str | None) -> int | None:
    if parity is None:
        return None
    try:
        return {"even": 0, "odd": 1}[parity]
    except KeyError:
        raise ValueError(f"parity must be 'even' or 'odd', got {parity!r}") from None


def _add_signatures(x: Signature, y: Signature) -> Signature:
    bx, by = _signature_bounds(x), _signature_bounds(y)
    if bx is None or by is None:
        return None
    return bx[0] + by[0], bx[1] + by[1]


def _as_declared(bundle: BundleSpec) -> DeclaredBlock:
    if bundle.is_declared:
        return bundle.content
    r = bundle_coinvariants(bundle).rank
    return DeclaredBlock(bundle.fiber_genus, bundle.base_genus, r, r, r % 2)


def section_sum(x: BundleSpec, y: BundleSpec) -> BundleSpec:
    """Normal connected sum along zero-square sections.

    Homologically the fiber splits as a direct sum, so every generator acts
    block diagonally. Gluing choices do not affect the homological action and
    are ignored.
    """
    if x.base_genus != y.base_genus:
        raise BaseMismatch(f"base genera differ: {x.base_genus} vs {y.base_genus}")
    for side, bundle in (("left", x), ("right", y)):
        if not bundle.has_zero_section:
            raise MissingSection(f"{side} summand has no section of self-intersection 0")
    g = x.fiber_genus + y.fiber_genus
    b = x.base_genus
    sig = _add_signatures(x.signature, y.signature)
    prov = Provenance("section_sum", children=(x.provenance, y.provenance))

    if isinstance(x.content, SymplecticRep) and isinstance(y.content, SymplecticRep):
        images = tuple(IntMatrix.block_diag(A, B) for A, B in zip(x.content.images, y.content.images))
        return BundleSpec(SymplecticRep(g, b, images), sig, True, prov)
    if isinstance(x.content, GeneratingSetRep) or isinstance(y.content, GeneratingSetRep):
        raise UnsupportedOperation("section sums of restricted generating sets are not supported")

    dx, dy = _as_declared(x), _as_declared(y)
    parity = None
    if dx.rank_parity is not None and dy.rank_parity is not None:
        parity = (dx.rank_parity + dy.rank_parity) % 2
    block = DeclaredBlock(g, b, dx.rank_lo + dy.rank_lo, dx.rank_hi + dy.rank_hi, parity)
    return BundleSpec(block, sig, True, prov)


def fiber_sum_with_product(x: BundleSpec, c: int) -> BundleSpec:
    """Fiber sum with ``fiber x Sigma_c``: base genus grows by ``c``, new generators act trivially."""
    if c < 1:
        raise ValueError("fiber_sum_with_product needs c >= 1")
    g, b = x.fiber_genus, x.base_genus + c
    content = x.content
    identity = IntMatrix.identity(2 * g)
    if isinstance(content, SymplecticRep):
        content = SymplecticRep(g, b, content.images + (identity,) * (2 * c))
    elif isinstance(content, GeneratingSetRep):
        content = GeneratingSetRep(g, b, content.images + (identity,) * (2 * c),
                                   origin=content.origin + f"; fiber sum with product over genus {c}")
    else:
        content = DeclaredBlock(g, b, content.rank_lo, content.rank_hi, content.rank_parity)
    return BundleSpec(content, x.signature, x.has_zero_section,
                      Provenance("fiber_sum_product", (("c", c),), (x.provenance,)))


def restrict_to_cover(bundle: BundleSpec, spec: CyclicCoverSpec) -> BundleSpec:
    """Pull the bundle back along the cyclic cover of the base defined by ``spec``.

    The fiber is untouched; the monodromy of the cover is the rep evaluated on
    Schreier generators of ``ker(spec)``. Tracked signature scales by the degree.
    """
    if bundle.is_declared:
        raise DeclaredBlockUnsupported("cannot restrict a declared block: monodromy unknown")
    rep = bundle.rep
    words = schreier_generators(SurfacePresentation(rep.base_genus), spec)
    images = tuple(evaluate_word(rep, w) for w in words)
    content = GeneratingSetRep(rep.fiber_genus, cover_genus(spec.n, rep.base_genus), images,
                               origin=spec.describe())
    bounds = bundle.signature_bounds
    sig = None if bounds is None else (spec.n * bounds[0], spec.n * bounds[1])
    prov = Provenance("cover", (("degree", spec.n), ("images", spec.images)), (bundle.provenance,))
    return BundleSpec(content, sig, bundle.has_zero_section, prov)


# the two families

def build_z_gb(g: int, b: int, parity_hint: str | None = "even",
               core: BundleSpec | None = None) -> BundleSpec:
    """Stabilize a core bundle to fiber genus ``g`` and base genus ``b``.

    The core (by default the declared EKKOS block) is section summed with a
    product block, after a Kodaira-Thurston block when its coinvariant rank is
    odd, then fiber summed with a product to reach base genus ``b``. For a
    declared core ``parity_hint`` picks the branch; for an explicit core the
    parity is read off and a contradicting hint is an error.
    """
    core = declared_ekkos(parity_hint) if core is None else core
    g0, b0 = core.fiber_genus, core.base_genus
    if b < b0:
        raise ValueError(f"base genus {b} below the core's {b0}")
    if core.is_declared:
        if core.content.rank_parity is None:
            if parity_hint is None:
                raise ValueError("a declared core without rank parity needs parity_hint")
            lo, hi, p = core.content.rank_lo, core.content.rank_hi, _parity_value(parity_hint)
            lo += (lo - p) % 2
            hi -= (hi - p) % 2
            core = BundleSpec(DeclaredBlock(g0, b0, lo, hi, p), core.signature,
                              core.has_zero_section, core.provenance)
        odd = core.content.rank_parity == 1
    else:
        odd = bundle_coinvariants(core).rank % 2 == 1
    if parity_hint is not None and _parity_value(parity_hint) != int(odd):
        raise ValueError(f"parity_hint {parity_hint!r} contradicts the core's coinvariant rank")

    padding = g - g0 - (1 if odd else 0)
    if padding < 1 - int(odd):
        raise ValueError(f"fiber genus {g} too small for this core")
    result = core
    if odd:
        result = section_sum(result, kodaira_thurston_q(b0))
    if padding:
        result = section_sum(result, product_block(padding, b0))
    if b > b0:
        result = fiber_sum_with_product(result, b - b0)
    return result


def build_w(g_plus_1: int, b: int, parity_hint: str | None = "even",
            core: BundleSpec | None = None) -> BundleSpec:
    """Section sum of the stabilized bundle of fiber genus ``g_plus_1 - 1`` with the trefoil block."""
    z = build_z_gb(g_plus_1 - 1, b, parity_hint, core)
    return section_sum(z, trefoil_block(b))
