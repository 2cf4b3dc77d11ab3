from fractions import Fraction

import pytest

from FHMpy.blocking import (WEAK, STRONG, block_lp, weak_block_lp, strong_block_lp, coalitions,
                            search_blocking_coalitions, find_blocking_coalition, brute_force_block)

half = Fraction(1, 2)


class TestBlockingLPs(object):

    """ Single-coalition blocking decisions """

    def test_weak_block_rows(self, e1):

        cert = weak_block_lp(e1, e1.endowments, (0, 2))

        assert cert.rows[0] == (0, half, 0, half)
        assert cert.rows[2] == (half, 0, half, 0)
        assert cert.verify(e1, e1.endowments)

    def test_completion_keeps_outsiders(self, e1):

        p = weak_block_lp(e1, e1.endowments, (0, 2)).completion(e1)

        assert tuple(p[1, :]) == tuple(e1.endowments[1, :])
        assert tuple(p[3, :]) == tuple(e1.endowments[3, :])
        assert all(sum(p[:, o]) == 1 for o in range(4))

    def test_strong_block(self, e1):

        cert = strong_block_lp(e1, e1.endowments, (2, 0))

        assert cert.mode == STRONG and cert.coalition == (0, 2)
        assert cert.value > 0
        assert cert.verify(e1, e1.endowments)

    def test_identical_pair_cannot_block(self, e1):

        assert weak_block_lp(e1, e1.endowments, (0, 1)) is None

    def test_favourites_cannot_be_blocked(self, no_trade_market):

        assert weak_block_lp(no_trade_market, no_trade_market.endowments, (0, 1)) is None

    def test_certificate_text(self, e1):

        text = weak_block_lp(e1, e1.endowments, (0, 2)).to_text()

        assert 'coalition: 1, 3' in text
        assert 'mode: weak' in text

    def test_baseline(self, e1):

        lp, baseline = block_lp(e1, e1.endowments, (0, 2), WEAK)

        assert baseline == sum((0, half, half)) + sum((0, half, half))
        assert lp.n_vars == 8


class TestCoalitionChecks(object):

    def test_singleton(self, e1):

        with pytest.raises(ValueError):
            weak_block_lp(e1, e1.endowments, (0,))

    def test_repeated_member(self, e1):

        with pytest.raises(ValueError):
            weak_block_lp(e1, e1.endowments, (0, 0))

    def test_unknown_agent(self, e1):

        with pytest.raises(ValueError):
            weak_block_lp(e1, e1.endowments, (0, 7))

    def test_bad_mode(self, e1):

        with pytest.raises(ValueError):
            block_lp(e1, e1.endowments, (0, 2), mode='medium')


class TestSearch(object):

    """ Canonical coalition order """

    def test_order(self):

        assert list(coalitions(3, 3)) == [(0, 1), (0, 2), (1, 2), (0, 1, 2)]

    def test_first_weak_block(self, e1):

        cert, checked = search_blocking_coalitions(e1, e1.endowments, WEAK)

        assert cert.coalition == (0, 2) and checked == 2

    def test_weak_core_allocation_unblocked(self, e1, weak_core_allocation):

        assert search_blocking_coalitions(e1, weak_core_allocation, STRONG) == (None, 11)

    def test_max_size(self, e1):

        with pytest.raises(ValueError):
            search_blocking_coalitions(e1, e1.endowments, max_size=5)

    def test_find_wrapper(self, e1):

        assert find_blocking_coalition(e1, e1.endowments, STRONG).coalition == (0, 2)


class TestBruteForce(object):

    def test_finds_exchange(self, e1):

        new = brute_force_block(e1, e1.endowments, (0, 2), WEAK, half)

        assert new is not None
        assert new[0] == (0, half, 0, half)

    def test_no_block(self, e1):

        assert brute_force_block(e1, e1.endowments, (0, 1), STRONG, half) is None

    def test_supply_off_grid(self, e1):

        with pytest.raises(ValueError):
            brute_force_block(e1, e1.endowments, (0, 2), WEAK, Fraction(1, 3))
