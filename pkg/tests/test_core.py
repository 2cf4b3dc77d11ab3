from fractions import Fraction

import pytest

from FHMpy import ratlp
from FHMpy.core import (IR, EENE, ConstraintSet, build_constraints, parse_tags, forced_bounds,
                        dominates_over_polytope, certify_uniform_strong_block, coalition_bundles, ttc,
                        in_strong_core, in_weak_core, sample_allocations)
from FHMpy.economy import Economy
from FHMpy.utils import object_matrix

half, quarter = Fraction(1, 2), Fraction(1, 4)


@pytest.fixture()
def ir_e1(e1):

    return build_constraints(e1, (IR,))


@pytest.fixture()
def ir_eene_e1_prime(e1_prime):

    return build_constraints(e1_prime, (IR, EENE))


class TestConstraintSets(object):

    """ Allocation polytopes with IR and EENE rows """

    def test_sizes(self, e1, ir_e1):

        assert len(build_constraints(e1)) == 8
        assert len(ir_e1) == 20
        assert len(build_constraints(e1, (IR, EENE))) == 32

    def test_origins(self, ir_e1):

        assert ir_e1.origins().count(IR) == 12

    def test_contains(self, e1, ir_e1, weak_core_allocation):

        assert ir_e1.contains(e1.endowments)
        assert ir_e1.contains(weak_core_allocation)

    def test_unknown_tag(self, e1):

        with pytest.raises(ValueError):
            build_constraints(e1, ('IC',))

    def test_parse_tags(self):

        assert parse_tags('IR+EENE') == (IR, EENE)
        assert parse_tags('none') == ()

    def test_parse_bad_tag(self):

        with pytest.raises(ValueError):
            parse_tags('XX')

    def test_variable_range(self):

        with pytest.raises(ValueError):
            ConstraintSet(2).add({4: 1}, ratlp.LE, 1)


class TestForcedBounds(object):

    def test_forced_half(self, ir_e1):

        fb = forced_bounds(ir_e1, {(0, 0): 1, (0, 1): 1})

        assert fb.forced and fb.min == half and fb.max == half

    def test_eene_caps(self, ir_eene_e1_prime):

        assert forced_bounds(ir_eene_e1_prime, {(0, 3): 1}).max == quarter
        assert forced_bounds(ir_eene_e1_prime, {(2, 0): 1}).max == quarter

    def test_bundled_allocation_inside(self, ir_eene_e1_prime, eene_allocation):

        fb = forced_bounds(ir_eene_e1_prime, {(1, 3): 1})

        assert ir_eene_e1_prime.contains(eene_allocation)
        assert fb.min <= eene_allocation[1, 3] <= fb.max

    def test_infeasible(self, ir_e1):

        c = ir_e1.copy()
        c.add({0: 1}, ratlp.EQ, 2)
        fb = forced_bounds(c, {(0, 0): 1})

        assert fb.infeasible and fb.min is None and not fb.forced
        assert ratlp.check_certificate(c.to_lp({0: 1}, 'min'), fb.min_outcome)


class TestPolytopeDominance(object):

    def test_exchange_is_best(self, e1, ir_e1):

        assert dominates_over_polytope(e1, ir_e1, 0, e1.endowments[2, :]) == (True, (0, 0, 0, 0))

    def test_bundle_length(self, e1, ir_e1):

        with pytest.raises(ValueError):
            dominates_over_polytope(e1, ir_e1, 0, (1, 0))

    def test_infeasible_set(self, e1, ir_e1):

        c = ir_e1.copy()
        c.add({0: 1}, ratlp.GE, 2)

        with pytest.raises(ValueError):
            dominates_over_polytope(e1, c, 0, e1.endowments[0, :])


class TestUniformBlock(object):

    """ A fixed exchange strongly blocking every allocation of a polytope """

    def test_certified(self, e1_prime, ir_eene_e1_prime):

        cert = certify_uniform_strong_block(e1_prime, ir_eene_e1_prime, (0, 2),
                                            [e1_prime.endowments[2, :], e1_prime.endowments[0, :]])

        assert cert.certified
        assert cert.gaps[2][0] == quarter
        assert cert.gaps[0][2] == quarter
        assert 0 in cert.strict[2] and 2 in cert.strict[0]

    def test_own_endowments_do_not_block(self, e1_prime, ir_eene_e1_prime):

        cert = certify_uniform_strong_block(e1_prime, ir_eene_e1_prime, (0, 2),
                                            [e1_prime.endowments[0, :], e1_prime.endowments[2, :]])

        assert not cert.certified and cert.failure is not None

    def test_bundles_must_redistribute(self, e1):

        with pytest.raises(ValueError):
            coalition_bundles(e1, (0, 2), [(1, 0, 0, 0), (0, 1, 0, 0)])

    def test_bundle_count(self, e1):

        with pytest.raises(ValueError):
            coalition_bundles(e1, (0, 2), [e1.endowments[0, :]])


class TestTTC(object):

    def test_three_agents(self, ttc_market):

        assert (ttc(ttc_market) == object_matrix([[0, 1, 0], [1, 0, 0], [0, 0, 1]])).all()

    def test_swap(self):

        e = Economy([(1, 0), (0, 1)], [[1, 0], [0, 1]])

        assert (ttc(e) == object_matrix([[0, 1], [1, 0]])).all()

    def test_no_trade(self, no_trade_market):

        assert (ttc(no_trade_market) == no_trade_market.endowments).all()

    def test_fractional_market(self, e1):

        with pytest.raises(ValueError):
            ttc(e1)


class TestMembership(object):

    """ Strong and weak core verdicts """

    def test_ttc_in_strong_core(self, ttc_market):

        p = ttc(ttc_market)

        assert in_strong_core(ttc_market, p).member
        assert in_weak_core(ttc_market, p).member

    def test_weak_core_allocation(self, e1, weak_core_allocation):

        report = in_weak_core(e1, weak_core_allocation)

        assert report.member and report.checked == 11

    def test_strong_core_empty(self, e1, weak_core_allocation):

        assert not in_strong_core(e1, weak_core_allocation).member

    def test_endowment_blocked(self, e1):

        report = in_weak_core(e1, e1.endowments)

        assert not report.member and report.certificate.coalition == (0, 2)
        assert report.to_lines()[:2] == ['notion: weak core', 'verdict: non-member']

    def test_ir_failure(self, e1):

        identity = object_matrix([[1 if i == o else 0 for o in range(4)] for i in range(4)])
        report = in_weak_core(e1, identity)

        assert report.ir_violator == 2 and report.checked == 0

    def test_eene_allocation_not_in_weak_core(self, e1_prime, eene_allocation):

        assert not in_weak_core(e1_prime, eene_allocation).member


class TestSampling(object):

    def test_vertices_inside(self, ir_e1):

        samples = sample_allocations(ir_e1, seed=0, count=3)

        assert len(samples) == 3
        assert all(ir_e1.contains(p) for p in samples)

    def test_samples_not_in_strong_core(self, e1, ir_e1):

        assert not any(in_strong_core(e1, p).member for p in sample_allocations(ir_e1, seed=1, count=2))

    def test_eene_samples_not_in_weak_core(self, e1_prime, ir_eene_e1_prime):

        assert not any(in_weak_core(e1_prime, p).member for p in
                       sample_allocations(ir_eene_e1_prime, seed=2, count=2))

    def test_rejection(self):

        samples = sample_allocations(ConstraintSet(3), seed=0, count=2, method='rejection')

        assert len(samples) == 2

    def test_bad_method(self, ir_e1):

        with pytest.raises(ValueError):
            sample_allocations(ir_e1, method='gibbs')
