from fractions import Fraction

import numpy as np
import pytest

from FHMpy.utils import (ParseError, parse_rational, format_rational, as_fraction, object_matrix, digest,
                         random_doubly_stochastic, random_permutation_matrix, random_preferences, sinkhorn)


class TestRationals(object):

    """ Parsing and formatting of exact rationals """

    @pytest.mark.parametrize('token, value', [
        ('3/6', Fraction(1, 2)),
        ('0.25', Fraction(1, 4)),
        ('-2', Fraction(-2)),
        ('.5', Fraction(1, 2)),
    ])
    def test_parse(self, token, value):

        assert parse_rational(token) == value

    def test_decimal_is_exact(self):

        assert parse_rational('0.1') == Fraction(1, 10)

    @pytest.mark.parametrize('token', ['1e3', 'nan', '1/-2', '0.1.2', '5.'])
    def test_rejected_literals(self, token):

        with pytest.raises(ParseError):
            parse_rational(token)

    def test_garbage(self):

        with pytest.raises(ParseError):
            parse_rational('abc')

    def test_zero_denominator(self):

        with pytest.raises(ParseError):
            parse_rational('1/0')

    def test_error_position(self):

        with pytest.raises(ParseError) as err:
            parse_rational('x', line=3, column=7)

        assert err.value.line == 3 and err.value.column == 7

    def test_format_integer(self):

        assert format_rational(Fraction(4, 2)) == '2'

    def test_format_fraction(self):

        assert format_rational(Fraction(-3, 4)) == '-3/4'

    def test_floats_are_not_exact(self):

        with pytest.raises(TypeError):
            as_fraction(0.5)


class TestObjectMatrix(object):

    def test_entries_are_fractions(self):

        m = object_matrix([[1, '1/2'], [0, Fraction(1, 3)]])

        assert all(isinstance(x, Fraction) for x in m.ravel())

    def test_read_only(self):

        m = object_matrix([[1, 0], [0, 1]])

        with pytest.raises(ValueError):
            m[0, 0] = 2

    def test_ragged_rows(self):

        with pytest.raises(ValueError):
            object_matrix([[1, 0], [1]])

    def test_shape_check(self):

        with pytest.raises(ValueError):
            object_matrix([[1, 0], [0, 1]], shape=(3, 3))


class TestRandomAllocations(object):

    """ Seeded samplers used by the property suites """

    def test_doubly_stochastic(self):

        m = random_doubly_stochastic(5, seed=0, maxden=8)

        assert all(sum(m[i, :]) == 1 for i in range(5))
        assert all(sum(m[:, o]) == 1 for o in range(5))
        assert all(x >= 0 and (x * 8).denominator == 1 for x in m.ravel())

    def test_seeded(self):

        assert (random_doubly_stochastic(4, seed=3) == random_doubly_stochastic(4, seed=3)).all()

    def test_permutation_matrix(self):

        m = random_permutation_matrix(4, seed=1)

        assert sorted(m.ravel().tolist()) == [0] * 12 + [1] * 4
        assert all(sum(m[i, :]) == 1 for i in range(4))

    def test_preferences_are_permutations(self):

        assert all(sorted(p) == [0, 1, 2] for p in random_preferences(3, seed=2))

    def test_sinkhorn(self):

        h = sinkhorn(np.random.RandomState(0).rand(3, 3) + 0.1, n_iter=200)

        assert np.allclose(h.sum(axis=0), 1) and np.allclose(h.sum(axis=1), 1, atol=1e-6)


def test_digest_is_stable():

    assert digest('abc') == digest(b'abc') and len(digest('abc')) == 16
