from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from kodfib.errors import ParityUndefined
from kodfib.monodromy import (DeclaredBlock, SymplecticRep, build_w, build_z_gb, bundle_coinvariants,
                              declared_bundle, declared_ekkos, explicit_bundle, kodaira_thurston_q,
                              product_block, section_sum, trefoil_block)
from kodfib.obstructions import (CheckConfig, ObstructionOutcome, Status, check_chi_window,
                                 check_cover, check_genus_bounds, check_modified_xiao, check_parity,
                                 check_signature_positive, check_torelli_trivial, check_xiao,
                                 chern_invariants, cover_sweep, s_from_rank, verdict)
from kodfib.surface import CyclicCoverSpec

E, P, I, C = Status.EXCLUDED, Status.PASSED, Status.INCONCLUSIVE, Status.CONDITIONAL


def w_demo():
    core = section_sum(section_sum(kodaira_thurston_q(9), kodaira_thurston_q(9)), product_block(1, 9))
    return build_w(13, 9, None, core)


def test_genus_bounds():
    assert check_genus_bounds(3, 2).status is P
    assert check_genus_bounds(2, 5).status is E
    assert check_genus_bounds(3, 1).status is E


def test_parity():
    assert check_parity(bundle_coinvariants(product_block(2, 2))).status is P
    r = check_parity(bundle_coinvariants(kodaira_thurston_q(9)))
    assert r.status is E and "19" in r.detail
    assert check_parity(bundle_coinvariants(trefoil_block(9))).status is P
    assert check_parity([0, 1, 2], 9).status is I
    assert check_parity([1, 3], 9).status is E
    assert check_parity([0, 2], 9).status is P


def test_torelli():
    assert check_torelli_trivial(product_block(3, 2).content).status is E
    assert check_torelli_trivial(trefoil_block(9).content).status is P
    # [0, 5] never reaches 2g = 6, so the action is known to be nontrivial
    assert check_torelli_trivial(declared_ekkos().content).status is P
    assert check_torelli_trivial(DeclaredBlock(3, 9, 2, 6)).status is I
    assert check_torelli_trivial(DeclaredBlock(3, 9, 6, 6)).status is E


def test_xiao_examples():
    assert check_xiao(8, 1).status is E
    assert check_xiao(7, 1).status is P
    for s in range(0, 6):
        assert check_xiao(1 + 6 * s, s).status is P


def test_xiao_equivalence_exhaustive():
    for g in range(1, 31):
        for s in range(0, g + 1):
            assert (check_xiao(g, s).status is P) == (g <= 1 + 6 * s)


def test_xiao_intervals():
    assert check_xiao(20, [1, 2, 3]).status is E
    assert check_xiao(19, [1, 2, 3]).status is I
    assert check_xiao(7, [1, 2, 3]).status is P
    assert check_xiao(7, []).status is I
    assert check_xiao(8, [1]).status is E


def test_s_from_rank():
    assert s_from_rank(5, 8) == 1
    with pytest.raises(ParityUndefined):
        s_from_rank(5, 7)


def test_modified_xiao():
    assert check_modified_xiao(4, 4, 9).status is C
    assert check_modified_xiao(6, 4, 9).status is P
    r = check_modified_xiao(5, 4, 2)
    assert r.status is C and r.conditional_check
    assert "g - 2" in r.detail


def test_conditional_status_reserved_for_conditional_checks():
    with pytest.raises(ValueError):
        ObstructionOutcome("xiao", Status.CONDITIONAL, "x")


def test_chi_window_examples():
    assert check_chi_window(3, 2).status is E
    assert check_chi_window(4, 2).status is E
    assert check_chi_window(5, 2, 5).status is P
    assert check_chi_window(5, 2, 4).status is E
    assert check_chi_window(5, 2, 6).status is E  # 3*6 = 18 hits the upper bound 16 from above


def test_chi_window_scan_b2():
    empty = [g for g in range(3, 51) if check_chi_window(g, 2).status is E]
    assert empty == [3, 4]


@given(st.integers(2, 40), st.integers(2, 40))
def test_chi_window_matches_brute_force(g, b):
    lo, hi = 3 * (b - 1) * (g - 1), 4 * (b - 1) * (g - 1)
    exists = any(lo < 3 * chi < hi for chi in range(0, hi))
    assert (check_chi_window(g, b).status is P) == exists


def test_chern_invariants():
    c = chern_invariants(5, 2, 5)
    assert (c.e, c.sigma, c.K2, c.slope) == (16, 4, 44, Fraction(11, 4))
    assert float(c.slope) == 2.75
    c = chern_invariants(3, 3, 5)
    assert (c.e, c.sigma, c.K2) == (16, 4, 44)
    assert chern_invariants(4, 5, 12).sigma == 0


def test_signature_positive():
    assert check_signature_positive(4).status is P
    assert check_signature_positive(0).status is E
    assert check_signature_positive(None, False).status is I
    assert check_signature_positive((0, 4)).status is I
    assert check_signature_positive((1, 4)).status is P
    assert check_signature_positive((-4, 0)).status is E


def test_degree_one_cover_reproduces_direct_checks():
    for bundle in (trefoil_block(3), kodaira_thurston_q(3), product_block(2, 3)):
        rep = bundle.content
        report, excluded, _ = check_cover(rep, CyclicCoverSpec(1, (0,) * (2 * rep.base_genus)))
        direct = bundle_coinvariants(bundle)
        assert (report.rank, report.base_genus) == (direct.rank, direct.base_genus)
        parity_bad = direct.rank % 2 == 1
        xiao_bad = not parity_bad and check_xiao(direct.fiber_genus, direct.s).status is E
        assert excluded == (parity_bad or xiao_bad)


def test_cover_sweep_finds_trefoil_witness():
    out = cover_sweep(w_demo(), CheckConfig(cover_degrees=(6,)))
    assert out.status is E
    assert out.witness["degree"] == 6
    assert out.witness["images"][0] == 1 and not any(out.witness["images"][1:])
    assert out.witness["cover_base_genus"] == 49


def test_cover_sweep_declared_is_inconclusive():
    assert cover_sweep(declared_ekkos()).status is I


def test_exhaustive_cap_warns():
    rep = section_sum(trefoil_block(2), product_block(6, 2))
    capped = CheckConfig(cover_degrees=(2,), cover_strategy="exhaustive-capped", exhaustive_cap=3)
    out = cover_sweep(rep, capped)
    assert out.status is I and "cap of 3" in out.detail
    full = cover_sweep(rep, CheckConfig(cover_degrees=(2,), cover_strategy="exhaustive-capped"))
    # the 2^4 - 1 surjections onto Z/2
    assert full.status is P and full.detail.startswith("15 covers")


def test_check_config_validation():
    with pytest.raises(ValueError):
        CheckConfig(cover_degrees=(1,))
    with pytest.raises(ValueError):
        CheckConfig(cover_strategy="random")


def test_verdict_product_is_excluded_by_torelli():
    v = verdict(product_block(3, 2))
    assert v.overall == "excluded"
    assert v.outcome("torelli").status is E


def test_verdict_z_family():
    for g in range(4, 30):
        v = verdict(build_z_gb(g, 9))
        assert v.outcome("signature").status is P
        xiao = v.outcome("xiao").status
        if g > 19:
            assert xiao is E and v.overall == "excluded"
        elif g <= 7:
            assert xiao is P
        else:
            assert xiao is I


def test_verdict_w_demo():
    w = w_demo()
    s0 = bundle_coinvariants(w).s
    assert 1 + 6 * (s0 - 1) < 13 <= 1 + 6 * s0
    v = verdict(w, CheckConfig(cover_degrees=(6,)))
    assert v.outcome("xiao").status is P
    assert v.outcome("cover-sweep").status is E
    assert v.overall == "excluded"


def test_modified_xiao_never_changes_overall():
    bundle = declared_bundle(DeclaredBlock(5, 2, 8, 8), 4, True)
    plain = verdict(bundle, CheckConfig(chi=5))
    cond = verdict(bundle, CheckConfig(chi=5, enable_modified_xiao=True))
    assert plain.overall == cond.overall == "unobstructed"
    assert [o.status for o in cond.conditional] == [C]
    assert plain.conditional == ()


def test_supplying_chi_is_monotone():
    bundles = [product_block(3, 2), trefoil_block(9), build_z_gb(8, 9),
               declared_bundle(DeclaredBlock(5, 2, 8, 8), 4, True)]
    for bundle in bundles:
        base = {o.name: o.status for o in verdict(bundle).outcomes}
        for chi in range(0, 12):
            with_chi = {o.name: o.status for o in verdict(bundle, CheckConfig(chi=chi)).outcomes}
            for name, status in base.items():
                if status is E:
                    assert with_chi[name] is E


def test_all_identity_reps_are_excluded():
    for g in range(1, 4):
        for b in range(1, 4):
            v = verdict(explicit_bundle(SymplecticRep.trivial(g, b)))
            assert v.overall == "excluded"
            assert "product" in v.outcome("torelli").detail
