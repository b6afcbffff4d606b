import random
from fractions import Fraction
from math import prod

import pytest

from conftest import random_rep, random_symplectic
from kodfib.errors import (BaseMismatch, DeclaredBlockUnsupported, MissingSection, RelatorViolation,
                           ShapeError, SymplecticViolation, UnsupportedOperation)
from kodfib.linalg import IntMatrix
from kodfib.monodromy import (KODAIRA_THURSTON_MONODROMY, TREFOIL_MONODROMY, DeclaredBlock,
                              SymplecticRep, build_w, build_z_gb, bundle_coinvariants,
                              candidate_ranks, coinvariants, declared_bundle, declared_ekkos,
                              evaluate_word, explicit_bundle, fiber_sum_with_product, is_symplectic,
                              kodaira_thurston_q, product_block, restrict_to_cover, section_sum,
                              symplectic_form, symplectic_inverse, trefoil_block, validate_rep)
from kodfib.surface import CyclicCoverSpec, SurfacePresentation, Word

I2 = IntMatrix.identity(2)


def rational_coinvariant_rank(images, g):
    """2g minus the rational rank of the stacked M - I, by Fraction elimination."""
    rows = [[Fraction(x) for M in images for x in (M - IntMatrix.identity(2 * g)).row(i)]
            for i in range(2 * g)]
    rk = 0
    for c in range(len(rows[0]) if rows and rows[0] else 0):
        p = next((i for i in range(rk, len(rows)) if rows[i][c]), None)
        if p is None:
            continue
        rows[rk], rows[p] = rows[p], rows[rk]
        for i in range(rk + 1, len(rows)):
            f = rows[i][c] / rows[rk][c]
            rows[i] = [x - f * y for x, y in zip(rows[i], rows[rk])]
        rk += 1
    return 2 * g - rk


# symplectic helpers

def test_symplectic_form_layout():
    assert symplectic_form(2).tolist() == [[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]]


def test_symplectic_inverse(rng):
    for g in (1, 2, 3):
        M = random_symplectic(rng, g)
        assert is_symplectic(M)
        assert (M @ symplectic_inverse(M)).is_identity()


def test_is_symplectic_rejects():
    assert not is_symplectic(IntMatrix([[2, 0], [0, 1]]))
    assert not is_symplectic(IntMatrix([[1, 0, 0]]))


# validation

def test_validate_examples():
    assert validate_rep(product_block(3, 2).content).ok
    assert validate_rep(trefoil_block(9).content).ok
    bad = SymplecticRep(1, 1, (IntMatrix([[2, 0], [0, 1]]), I2))
    kinds = {f.kind for f in validate_rep(bad).failures}
    assert kinds == {"symplectic", "determinant"}
    with pytest.raises(SymplecticViolation):
        explicit_bundle(bad)


def test_relator_failure_detected():
    A, B = TREFOIL_MONODROMY, KODAIRA_THURSTON_MONODROMY
    rep = SymplecticRep(1, 1, (A, B))
    report = validate_rep(rep)
    assert [f.kind for f in report.failures] == ["relator"]
    with pytest.raises(RelatorViolation):
        report.raise_for_failures()


def test_shape_errors():
    with pytest.raises(ShapeError):
        SymplecticRep(1, 2, (I2, I2, I2))
    with pytest.raises(ShapeError):
        SymplecticRep(2, 1, (I2, I2))


def test_evaluate_word_is_a_homomorphism(rng):
    for _ in range(20):
        rep = random_rep(rng, 2, 2)
        letters = [(rng.randrange(4), rng.choice((1, -1))) for _ in range(6)]
        u, v = Word(tuple(letters[:3])), Word(tuple(letters[3:]))
        assert evaluate_word(rep, u * v) == evaluate_word(rep, u) @ evaluate_word(rep, v)
        assert (evaluate_word(rep, u) @ evaluate_word(rep, u.inverse())).is_identity()
        assert evaluate_word(rep, SurfacePresentation(2).relator).is_identity()


# coinvariants

def test_coinvariants_hand_examples():
    r = coinvariants([IntMatrix([[1, 2], [0, 1]])], 1, 1)
    assert (r.rank, r.torsion) == (1, (2,))
    r = coinvariants([IntMatrix([[-1, 0], [0, -1]])], 1, 1)
    assert (r.rank, r.torsion) == (0, (2, 2))
    r = coinvariants([TREFOIL_MONODROMY], 1, 9)
    assert (r.rank, r.torsion, r.s, r.q_f, r.b1) == (0, (), 1, 0, 18)


def test_kodaira_thurston_block():
    r = bundle_coinvariants(kodaira_thurston_q(9))
    assert (r.rank, r.torsion, r.b1) == (1, (), 19)
    assert r.s is None and r.q_f is None


def test_product_block_coinvariants():
    for g in range(1, 5):
        r = bundle_coinvariants(product_block(g, 2))
        assert (r.rank, r.q_f, r.s) == (2 * g, g, 0)


def test_rank_matches_rational_oracle(rng):
    for _ in range(30):
        g, b = rng.randint(1, 3), rng.randint(1, 3)
        rep = random_rep(rng, g, b)
        assert coinvariants(rep.images, g, b).rank == rational_coinvariant_rank(rep.images, g)


def test_section_sum_additivity_on_random_pairs():
    rng = random.Random(11)
    for _ in range(50):
        b = rng.randint(1, 3)
        g1, g2 = rng.randint(1, 3), rng.randint(1, 3)
        x = explicit_bundle(random_rep(rng, g1, b), 0, True)
        y = explicit_bundle(random_rep(rng, g2, b), 0, True)
        s = section_sum(x, y)
        assert validate_rep(s.content).ok
        rx, ry, rs = (bundle_coinvariants(z) for z in (x, y, s))
        assert rs.rank == rx.rank + ry.rank
        assert prod(rs.torsion) == prod(rx.torsion) * prod(ry.torsion)


def test_cover_never_loses_rank(rng):
    for _ in range(10):
        g, b = rng.randint(1, 2), rng.randint(1, 2)
        bundle = explicit_bundle(random_rep(rng, g, b))
        base = bundle_coinvariants(bundle).rank
        for n in (2, 3):
            cover = restrict_to_cover(bundle, CyclicCoverSpec.twisting(n, rng.randrange(2 * b), b))
            assert bundle_coinvariants(cover).rank >= base


# blocks and the section calculus

def test_trefoil_cover_gains_two():
    cover = restrict_to_cover(trefoil_block(9), CyclicCoverSpec.twisting(6, 0, 9))
    assert cover.base_genus == 49
    assert len(cover.content.images) == 103
    assert bundle_coinvariants(cover).rank == 2
    assert cover.signature == 0


def test_declared_ekkos_parity_branches():
    assert declared_ekkos().content.rank_interval == (0, 5)
    assert declared_ekkos("even").content.candidate_ranks() == [0, 2, 4]
    assert declared_ekkos("odd").content.candidate_ranks() == [1, 3, 5]
    e = declared_ekkos()
    assert (e.fiber_genus, e.base_genus, e.signature, e.has_zero_section) == (3, 9, 4, True)


def test_declared_block_validation():
    with pytest.raises(ShapeError):
        DeclaredBlock(2, 2, 0, 5)
    with pytest.raises(ShapeError):
        DeclaredBlock(2, 2, 1, 1, 0)


def test_section_sum_requires_matching_base_and_sections():
    with pytest.raises(BaseMismatch):
        section_sum(product_block(1, 2), product_block(1, 3))
    no_section = explicit_bundle(SymplecticRep.trivial(1, 2), 0, False)
    with pytest.raises(MissingSection):
        section_sum(no_section, product_block(1, 2))


def test_section_sum_explicit_is_block_diagonal():
    s = section_sum(trefoil_block(2), kodaira_thurston_q(2))
    assert s.fiber_genus == 2 and s.signature == 0
    assert s.content.images[0].tolist() == [[1, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 1, 1], [0, 0, 0, 1]]
    assert bundle_coinvariants(s).rank == 1
    assert s.provenance.leaf_count() == 2


def test_section_sum_declared_interval():
    h = 3
    s = section_sum(declared_ekkos(), product_block(h + 1, 9))
    assert s.is_declared
    assert s.content.rank_interval == (2 * h + 2, 2 * h + 7)
    assert s.signature == 4


def test_section_sum_parity_propagates():
    s = section_sum(declared_ekkos("odd"), kodaira_thurston_q(9))
    assert s.content.rank_parity == 0
    assert candidate_ranks(s) == [2, 4, 6]
    s = section_sum(declared_ekkos(), kodaira_thurston_q(9))
    assert s.content.rank_parity is None


def test_section_sum_signature_intervals():
    x = declared_bundle(DeclaredBlock(2, 2, 0, 4), (0, 4), True)
    y = declared_bundle(DeclaredBlock(3, 2, 0, 5), 4, True)
    assert section_sum(x, y).signature == (4, 8)
    assert section_sum(x, declared_bundle(DeclaredBlock(1, 2, 0, 2), None, True)).signature is None


def test_fiber_sum_keeps_rank_and_signature():
    f = fiber_sum_with_product(trefoil_block(2), 3)
    assert f.base_genus == 5 and validate_rep(f.content).ok
    assert bundle_coinvariants(f).rank == 0
    d = fiber_sum_with_product(declared_ekkos("even"), 2)
    assert d.base_genus == 11 and d.content.candidate_ranks() == [0, 2, 4] and d.signature == 4
    with pytest.raises(ValueError):
        fiber_sum_with_product(trefoil_block(2), 0)


def test_declared_blocks_refuse_monodromy_operations():
    with pytest.raises(DeclaredBlockUnsupported):
        restrict_to_cover(declared_ekkos(), CyclicCoverSpec.twisting(2, 0, 9))
    with pytest.raises(DeclaredBlockUnsupported):
        bundle_coinvariants(declared_ekkos())


def test_generating_set_cannot_be_section_summed():
    cover = restrict_to_cover(trefoil_block(2), CyclicCoverSpec.twisting(2, 0, 2))
    with pytest.raises(UnsupportedOperation):
        section_sum(cover, product_block(1, 3))


# families

def test_build_z_gb_even_branch():
    for h in range(0, 5):
        z = build_z_gb(h + 4, 9, "even")
        assert z.fiber_genus == h + 4 and z.base_genus == 9
        assert z.signature == 4
        ranks = z.content.candidate_ranks()
        assert all(r % 2 == 0 for r in ranks)
        assert sorted({z.fiber_genus - r // 2 for r in ranks}) == [1, 2, 3]


def test_build_z_gb_odd_branch_uses_kodaira_thurston():
    z = build_z_gb(10, 9, "odd")
    assert z.content.rank_parity == 0
    assert sorted({10 - r // 2 for r in z.content.candidate_ranks()}) == [1, 2, 3]
    assert "kodaira_thurston" in z.provenance.render()


def test_build_z_gb_larger_base():
    z = build_z_gb(8, 12)
    assert z.base_genus == 12 and z.signature == 4


def test_build_z_gb_explicit_core():
    core = section_sum(kodaira_thurston_q(9), kodaira_thurston_q(9))
    z = build_z_gb(5, 9, None, core)
    assert bundle_coinvariants(z).rank == 2 + 6
    with pytest.raises(ValueError):
        build_z_gb(5, 9, "odd", core)


def test_build_w_adds_trefoil():
    w = build_w(13, 9)
    assert w.fiber_genus == 13 and w.signature == 4
    assert sorted({13 - r // 2 for r in w.content.candidate_ranks()}) == [2, 3, 4]


def test_documented_block_identities():
    assert fiber_sum_with_product(trefoil_block(1), 8).content == trefoil_block(9).content
    assert section_sum(product_block(1, 4), product_block(1, 4)).content == product_block(2, 4).content
    assert fiber_sum_with_product(product_block(2, 2), 1).content == product_block(2, 3).content
    d = fiber_sum_with_product(declared_ekkos(), 3)
    assert (d.fiber_genus, d.base_genus, d.signature, d.content.rank_interval) == (3, 12, 4, (0, 5))
    r = bundle_coinvariants(product_block(3, 9))
    assert (r.rank, r.b1) == (6, 24)
    assert bundle_coinvariants(product_block(1, 1)).b1 == 4
    s = section_sum(trefoil_block(9), product_block(1, 9))
    assert bundle_coinvariants(s).rank == 2
    assert evaluate_word(trefoil_block(9).content, Word.generator(0, 6)).is_identity()
    assert evaluate_word(trefoil_block(9).content, Word()).is_identity()


def test_degree_one_and_trivial_restrictions():
    bundle = trefoil_block(3)
    same = restrict_to_cover(bundle, CyclicCoverSpec(1, (0,) * 6))
    assert same.content.images == bundle.content.images and same.base_genus == 3
    trivial = restrict_to_cover(product_block(1, 2), CyclicCoverSpec.twisting(2, 0, 2))
    assert all(M.is_identity() for M in trivial.content.images)
    assert bundle_coinvariants(trivial).rank == 2 and trivial.base_genus == 3
