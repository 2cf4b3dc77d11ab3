from fractions import Fraction

import pytest

from FHMpy.economy import (Economy, InvalidEconomyError, parse_economy, serialize_economy, parse_allocation,
                           serialize_allocation, validate_economy, validate_allocation, as_allocation,
                           endowment_allocation, equal_class_partition, equal_endowment_groups, load_bundled)
from FHMpy.utils import ParseError


@pytest.fixture()
def bad_rows():

    return "2\no_1 o_2\no_1 o_2\n1/2 1/2\n1/2 1/4\n"


class TestParseEconomy(object):

    """ Reading economy files """

    def test_bundled_size(self, e1):

        assert e1.n == 4

    def test_preferences_zero_based(self, e1):

        assert e1.preferences[0] == (1, 0, 3, 2)
        assert e1.preferences[2] == (0, 1, 2, 3)

    def test_endowments_exact(self, e1):

        assert e1.endowments[0, 0] == Fraction(1, 2)
        assert e1.endowments[2, 3] == Fraction(1, 2)

    def test_short_object_names(self):

        e = parse_economy("2\no2 o1\no1 o2\n1 0\n0 1\n")

        assert e.preferences == ((1, 0), (0, 1))

    def test_row_sum_violation(self, bad_rows):

        with pytest.raises(InvalidEconomyError) as err:
            parse_economy(bad_rows)

        assert 'row' in err.value.report.kinds()
        assert 'column' in err.value.report.kinds()

    def test_bad_object_name_position(self):

        with pytest.raises(ParseError) as err:
            parse_economy("2\nx1 o_2\no_1 o_2\n1 0\n0 1\n")

        assert err.value.line == 2 and err.value.column == 1

    def test_missing_rows(self):

        with pytest.raises(ParseError):
            parse_economy("2\no_1 o_2\no_1 o_2\n1 0\n")

    def test_trailing_content(self):

        with pytest.raises(ParseError):
            parse_economy("1\no_1\n1\n1\n")

    def test_repeated_object(self):

        with pytest.raises(InvalidEconomyError) as err:
            Economy([(0, 0), (0, 1)], [[1, 0], [0, 1]])

        assert 'preference' in err.value.report.kinds()

    def test_serialize_round_trip(self, e1):

        assert parse_economy(serialize_economy(e1)) == e1


class TestEconomy(object):

    def test_with_preferences(self, e1, e1_prime):

        assert e1.with_preferences(e1_prime.preferences) == e1_prime

    def test_ranks(self, e1):

        assert e1.ranks(2) == (0, 1, 2, 3)
        assert e1.ranks(0)[1] == 0

    def test_hash_consistent_with_equality(self, e1):

        assert hash(e1) == hash(parse_economy(load_bundled('e1.txt')))

    def test_unvalidated_economy_reports(self):

        e = Economy([(0, 1), (0, 1)], [[1, 1], [0, 0]], validate=False)

        assert len(validate_economy(e)) > 0

    def test_endowment_allocation(self, e1):

        assert (endowment_allocation(e1) == e1.endowments).all()


class TestEqualClasses(object):

    """ Equal classes (same order and endowment) and equal-endowment groups """

    def test_e1_classes(self, e1):

        assert equal_class_partition(e1) == ((0, 1), (2,), (3,))

    def test_e1_prime_all_singletons(self, e1_prime):

        assert equal_class_partition(e1_prime) == ((0,), (1,), (2,), (3,))

    def test_endowment_groups(self, e1_prime):

        assert equal_endowment_groups(e1_prime) == ((0, 1), (2, 3))


class TestAllocations(object):

    def test_parse(self, weak_core_allocation):

        assert weak_core_allocation[2, 0] == Fraction(1, 2)

    def test_round_trip(self, eene_allocation):

        assert (parse_allocation(serialize_allocation(eene_allocation)) == eene_allocation).all()

    def test_size_mismatch(self):

        with pytest.raises(ParseError):
            parse_allocation("1 0\n0 1\n", 3)

    def test_not_doubly_stochastic(self):

        with pytest.raises(InvalidEconomyError):
            parse_allocation("1 0\n1 0\n")

    def test_validate_reports_columns(self):

        assert validate_allocation([[1, 0], [1, 0]]).kinds() == ['column', 'column']

    def test_as_allocation_shape(self, e1):

        with pytest.raises(ValueError):
            as_allocation([[1, 0], [0, 1]], e1.n)
