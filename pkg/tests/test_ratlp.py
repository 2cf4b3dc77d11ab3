from fractions import Fraction

import pytest

from FHMpy import ratlp
from FHMpy.ratlp import LinearProgram, LpOutcome, LE, EQ, GE, solve, check_certificate, dump


@pytest.fixture()
def textbook():

    lp = LinearProgram(2, sense='max', names=['x', 'y'])
    lp.add_constraint([1, 2], LE, 4)
    lp.add_constraint([3, 1], LE, 6)
    lp.set_objective([1, 1])
    return lp


@pytest.fixture()
def beale():

    # Cycles under the textbook largest-coefficient rule
    lp = LinearProgram(4, sense='min')
    lp.add_constraint(['1/4', -8, -1, 9], LE, 0)
    lp.add_constraint(['1/2', -12, '-1/2', 3], LE, 0)
    lp.add_constraint([0, 0, 1, 0], LE, 1)
    lp.set_objective(['-3/4', 20, '-1/2', 6])
    return lp


class TestOptimal(object):

    """ Optimal outcomes and their dual certificates """

    def test_textbook_point(self, textbook):

        out = solve(textbook)

        assert out.optimal
        assert out.x == (Fraction(8, 5), Fraction(6, 5))
        assert out.value == Fraction(14, 5)

    def test_textbook_duals(self, textbook):

        out = solve(textbook)

        assert out.duals[:2] == (Fraction(2, 5), Fraction(1, 5))
        assert out.duals[2:] == (0, 0)
        assert check_certificate(textbook, out)

    def test_minimise_covering(self):

        lp = LinearProgram(2, sense='min')
        lp.add_constraint([1, 1], GE, 2)
        lp.set_objective([2, 3])

        out = solve(lp)

        assert out.value == 4
        assert check_certificate(lp, out)

    def test_free_variable(self):

        lp = LinearProgram(1, sense='min')
        lp.set_bounds(0, None)
        lp.add_constraint([1], GE, -3)
        lp.set_objective([1])

        assert solve(lp).value == -3

    def test_upper_bound(self):

        lp = LinearProgram(1)
        lp.set_bounds(0, 0, '5/2')
        lp.set_objective([1])

        out = solve(lp)

        assert out.value == Fraction(5, 2)
        assert check_certificate(lp, out)

    def test_equality_row(self):

        lp = LinearProgram(2)
        lp.add_constraint([1, 1], EQ, 1)
        lp.set_objective([1, 2])

        out = solve(lp)

        assert out.x == (0, 1) and out.value == 2

    def test_sparse_coefficients(self):

        lp = LinearProgram(3)
        lp.add_constraint({2: 1}, LE, '7/3')
        lp.set_objective({2: 3})

        assert solve(lp).value == 7

    def test_beale_terminates(self, beale):

        out = solve(beale)

        assert out.optimal and out.value == Fraction(-5, 4)

    def test_deterministic(self, beale):

        assert solve(beale) == solve(beale)


class TestInfeasibleAndUnbounded(object):

    def test_farkas(self):

        lp = LinearProgram(1)
        lp.add_constraint([1], LE, 1)
        lp.add_constraint([1], GE, 2)

        out = solve(lp)

        assert out.infeasible and out.value is None
        assert check_certificate(lp, out)

    def test_ray(self):

        lp = LinearProgram(2)
        lp.add_constraint([1, -1], LE, 1)
        lp.set_objective([1, 0])

        out = solve(lp)

        assert out.unbounded
        assert check_certificate(lp, out)

    def test_infeasible_equalities(self):

        lp = LinearProgram(2)
        lp.add_constraint([1, 1], EQ, 1)
        lp.add_constraint([1, 1], EQ, 2)

        assert solve(lp).infeasible


class TestCertificateChecker(object):

    """ Tampered certificates are rejected """

    def test_tampered_dual(self, textbook):

        out = solve(textbook)
        bad = LpOutcome(out.status, out.value, out.x, (Fraction(1, 2),) + out.duals[1:])

        assert not check_certificate(textbook, bad)

    def test_tampered_value(self, textbook):

        out = solve(textbook)
        bad = LpOutcome(out.status, out.value + 1, out.x, out.duals)

        assert not check_certificate(textbook, bad)

    def test_wrong_length(self, textbook):

        out = solve(textbook)

        with pytest.raises(ValueError):
            check_certificate(textbook, LpOutcome(out.status, out.value, out.x, out.duals[:1]))

    def test_solver_checks_itself(self, textbook):

        assert ratlp.VERIFY_CERTIFICATES


class TestModel(object):

    def test_bad_relation(self):

        with pytest.raises(ValueError):
            LinearProgram(1).add_constraint([1], '<', 1)

    def test_bad_length(self):

        with pytest.raises(ValueError):
            LinearProgram(2).add_constraint([1], LE, 1)

    def test_bad_sense(self):

        with pytest.raises(ValueError):
            LinearProgram(1, sense='maximise')

    def test_float_coefficient(self):

        with pytest.raises(TypeError):
            LinearProgram(1).add_constraint([0.5], LE, 1)

    def test_dump(self, textbook):

        text = dump(textbook)

        assert 'maximize 1 x + 1 y' in text
        assert 'subject to' in text
        assert '1 x + 2 y <= 4' in text
