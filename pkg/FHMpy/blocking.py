"""
Coalition blocking by exact LPs.

A coalition S reallocates its own endowments among its members. Only the coalition's rows are solved for; the
full reallocation is completed by letting every non-member keep their endowment.
"""

import warnings
from fractions import Fraction
from itertools import combinations

from FHMpy import ratlp
from FHMpy.dominance import compositions, cum, cum_coefficients, weak_sd, strict_sd
from FHMpy.economy import as_allocation, object_name
from FHMpy.utils import format_row, object_matrix, object_vector


WEAK, STRONG = 'weak', 'strong'

COALITION_WARNING_SIZE = 16


class BlockCertificate():

    """
    A coalition, the mode of blocking and the members' new assignments

    Args:
        coalition: Sorted tuple of agent indices
        mode: 'weak' or 'strong'
        rows: Dict agent -> new assignment (tuple of Fractions)
        slacks: Dict agent -> per-prefix improvement cum(new) - cum(old)
        value: Optimal LP value that decided the block

    """

    def __init__(self, coalition, mode, rows, slacks, value=None):
        self.coalition = tuple(coalition)
        self.mode = mode
        self.rows = rows
        self.slacks = slacks
        self.value = value

    def completion(self, e):

        """
        Full allocation p' with the coalition rows and every non-member keeping their endowment
        """

        return object_matrix([self.rows[i] if i in self.rows else e.endowments[i, :] for i in range(e.n)])

    def verify(self, e, p):

        """
        Re-verifies the certificate against p by direct substitution
        """

        p = as_allocation(p, e.n)
        for i in self.coalition:
            row = self.rows[i]
            if any(x < 0 for x in row) or sum(row, Fraction(0)) != 1:
                return False
        for o in range(e.n):
            if sum((self.rows[i][o] for i in self.coalition), Fraction(0)) != \
                    sum((e.endowments[i, o] for i in self.coalition), Fraction(0)):
                return False
        if not all(weak_sd(e.preferences[i], self.rows[i], p[i, :]) for i in self.coalition):
            return False
        strict = [strict_sd(e.preferences[i], self.rows[i], p[i, :]) for i in self.coalition]
        if self.mode == STRONG:
            return all(strict)
        return any(strict)

    def to_text(self):

        out = ['coalition: {0}'.format(', '.join(str(i + 1) for i in self.coalition)),
               'mode: {0}'.format(self.mode)]
        for i in self.coalition:
            out.append("p'{0} = {1}".format(i + 1, format_row(self.rows[i])))
        for i in self.coalition:
            out.append('slack {0}: {1}'.format(i + 1, format_row(self.slacks[i])))
        return '\n'.join(out)

    def __repr__(self):
        return 'BlockCertificate({0}, {1})'.format(self.mode, [i + 1 for i in self.coalition])


def _check_coalition(e, s):

    s = tuple(sorted(int(i) for i in s))
    if len(s) < 2:
        raise ValueError("Blocking coalitions need at least two members, got {0}".format(list(s)))
    if len(set(s)) != len(s) or s[0] < 0 or s[-1] >= e.n:
        raise ValueError("Invalid coalition {0} for {1} agents".format(list(s), e.n))
    return s


def block_lp(e, p, s, mode=WEAK):

    """
    The LP deciding whether coalition s blocks p

    Variables are the members' new rows (variable k*n + o for the k-th member) and, in strong mode, a last
    variable delta. Rows sum to 1, coalition columns sum to the coalition endowment, every prefix sum is at least
    the current one. Weak mode maximises the total of prefix sums; strong mode maximises delta, the smallest
    per-member total improvement.

    Args:
        e: Economy
        p: Allocation
        s: Coalition (iterable of agent indices)
        mode: 'weak' or 'strong'

    Returns:
        (LinearProgram, baseline) where baseline is subtracted from the optimum to get the gain
    """

    if mode not in (WEAK, STRONG):
        raise ValueError("Mode should be 'weak' or 'strong', got {0}".format(mode))
    s = _check_coalition(e, s)
    p = as_allocation(p, e.n)
    n = e.n
    k = len(s)
    n_vars = k * n + (1 if mode == STRONG else 0)
    names = ["p'{0},o{1}".format(i + 1, o + 1) for i in s for o in range(n)]
    if mode == STRONG:
        names.append('delta')
    lp = ratlp.LinearProgram(n_vars, sense='max', names=names)

    for a, i in enumerate(s):
        lp.add_constraint(dict((a * n + o, 1) for o in range(n)), ratlp.EQ, 1, label='row{0}'.format(i + 1))
    for o in range(n):
        supply = sum((e.endowments[i, o] for i in s), Fraction(0))
        lp.add_constraint(dict((a * n + o, 1) for a in range(k)), ratlp.EQ, supply,
                          label='supply,{0}'.format(object_name(o)))

    objective = {}
    baseline = Fraction(0)
    for a, i in enumerate(s):
        pref = e.preferences[i]
        current = cum(pref, p[i, :])
        total = {}
        for t in range(n - 1):
            coefs = cum_coefficients(pref, t, offset=a * n)
            lp.add_constraint(coefs, ratlp.GE, current[t], label='sd{0},{1}'.format(i + 1, t + 1))
            for j, q in coefs.items():
                total[j] = total.get(j, 0) + q
        if mode == STRONG:
            row = dict(total)
            row[n_vars - 1] = -1
            lp.add_constraint(row, ratlp.GE, sum(current[:n - 1], Fraction(0)),
                              label='gain{0}'.format(i + 1))
        else:
            for j, q in total.items():
                objective[j] = objective.get(j, 0) + q
            baseline += sum(current[:n - 1], Fraction(0))

    if mode == STRONG:
        objective = {n_vars - 1: 1}
    lp.set_objective(objective)
    return lp, baseline


def _block(e, p, s, mode):

    s = _check_coalition(e, s)
    p = as_allocation(p, e.n)
    lp, baseline = block_lp(e, p, s, mode)
    out = ratlp.solve(lp)
    if not out.optimal:
        return None
    gain = out.value - baseline
    if gain <= 0:
        return None
    n = e.n
    rows = {}
    slacks = {}
    for a, i in enumerate(s):
        row = object_vector(out.x[a * n:(a + 1) * n])
        rows[i] = tuple(row)
        slacks[i] = tuple(x - y for x, y in zip(cum(e.preferences[i], row), cum(e.preferences[i], p[i, :])))
    return BlockCertificate(s, mode, rows, slacks, value=gain)


def weak_block_lp(e, p, s):

    """
    Whether coalition s weakly blocks p

    Args:
        e: Economy
        p: Allocation
        s: Coalition with at least two members

    Returns:
        BlockCertificate or None
    """

    return _block(e, p, s, WEAK)


def strong_block_lp(e, p, s):

    """
    Whether coalition s strongly blocks p (every member strictly improves)

    Returns:
        BlockCertificate or None
    """

    return _block(e, p, s, STRONG)


def coalitions(n, max_size):

    """
    Coalitions of size 2..max_size in canonical order: by size, then lexicographic
    """

    for size in range(2, max_size + 1):
        for s in combinations(range(n), size):
            yield s


def search_blocking_coalitions(e, p, mode=WEAK, max_size=None, verbose=False):

    """
    Checks coalitions in canonical order and stops at the first certificate

    Args:
        e: Economy
        p: Allocation
        mode: 'weak' or 'strong'
        max_size: Largest coalition size to check, defaults to n
        verbose: Print a summary line when done

    Returns:
        (BlockCertificate or None, number of coalitions checked)
    """

    if max_size is None:
        max_size = e.n
    if max_size > e.n:
        raise ValueError("max_size {0} exceeds the number of agents {1}".format(max_size, e.n))
    if e.n > COALITION_WARNING_SIZE and max_size > COALITION_WARNING_SIZE:
        warnings.warn("Searching coalitions of up to {0} agents out of {1}; the number of coalitions grows as "
                      "2^n".format(max_size, e.n))

    p = as_allocation(p, e.n)
    checked = 0
    for s in coalitions(e.n, max_size):
        checked += 1
        cert = _block(e, p, s, mode)
        if cert is not None:
            if verbose:
                print("Coalition {0} {1}ly blocks after {2} checks".format([i + 1 for i in s], mode, checked))
            return cert, checked
    if verbose:
        print("No {0} block among {1} coalitions".format(mode, checked))
    return None, checked


def find_blocking_coalition(e, p, mode=WEAK, max_size=None):

    """
    First blocking certificate in canonical coalition order, or None
    """

    return search_blocking_coalitions(e, p, mode, max_size)[0]


def brute_force_block(e, p, s, mode=WEAK, step=Fraction(1, 4)):

    """
    Searches reallocations of the coalition's endowment with entries in multiples of step for a block of p

    Exhaustive and only meant as an oracle for small cross-checks (n <= 3). The coalition's supply must itself lie
    on the grid.

    Returns:
        Dict agent -> new row for the first block found, or None
    """

    s = _check_coalition(e, s)
    p = as_allocation(p, e.n)
    k = int(1 / Fraction(step))
    n = e.n
    supply = [sum((e.endowments[i, o] for i in s), Fraction(0)) * k for o in range(n)]
    if any(q.denominator != 1 for q in supply):
        raise ValueError("Coalition supply {0} is not on the 1/{1} grid".format(supply, k))
    supply = [int(q) for q in supply]
    unit = Fraction(1, k)

    def search(a, remaining, rows):
        if a == len(s):
            if any(r != 0 for r in remaining):
                return None
            new = dict((i, tuple(unit * x for x in row)) for i, row in zip(s, rows))
            weak = [weak_sd(e.preferences[i], new[i], p[i, :]) for i in s]
            strict = [strict_sd(e.preferences[i], new[i], p[i, :]) for i in s]
            if all(weak) and (all(strict) if mode == STRONG else any(strict)):
                return new
            return None
        for row in compositions(k, n):
            if all(x <= r for x, r in zip(row, remaining)):
                found = search(a + 1, [r - x for r, x in zip(remaining, row)], rows + [row])
                if found is not None:
                    return found
        return None

    return search(0, supply, [])
