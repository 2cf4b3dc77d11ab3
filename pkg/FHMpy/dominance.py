"""
First-order stochastic dominance and the allocation predicates built on it: IR, envy, ETE, EENE and sd-efficiency.

All comparisons go through cumulative ("cum") vectors: entry t is the share of an agent's t+1 most preferred
objects.
"""

from fractions import Fraction
from itertools import permutations

from FHMpy import ratlp
from FHMpy.economy import as_allocation, equal_class_partition, equal_endowment_groups
from FHMpy.utils import object_matrix


def cum(pref, a):

    """
    Cumulative shares of an assignment along a preference order

    Args:
        pref: Preference order, object indices best first
        a: Assignment (shares per object)

    Returns:
        Tuple of Fractions; entry t is the sum of a over the t+1 best objects
    """

    if len(pref) != len(a):
        raise ValueError("Preference over {0} objects but assignment has {1} entries".format(len(pref), len(a)))
    out = []
    total = Fraction(0)
    for o in pref:
        total += a[o]
        out.append(total)
    return tuple(out)


def cum_coefficients(pref, t, offset=0):

    """
    Sparse coefficients of the prefix sum over the t+1 best objects, for LP rows over variables offset + o
    """

    return dict((offset + o, Fraction(1)) for o in pref[:t + 1])


def weak_sd(pref, a, b):

    """
    True iff a weakly stochastically dominates b for the order pref
    """

    return all(x >= y for x, y in zip(cum(pref, a), cum(pref, b)))


def strict_sd(pref, a, b):

    ca, cb = cum(pref, a), cum(pref, b)
    return all(x >= y for x, y in zip(ca, cb)) and ca != cb


def is_IR(e, p):

    """
    Individual rationality: every agent's assignment weakly dominates their endowment

    Returns:
        (holds, lowest-index violating agent or None)
    """

    p = as_allocation(p, e.n)
    for i in range(e.n):
        if not weak_sd(e.preferences[i], p[i, :], e.endowments[i, :]):
            return False, i
    return True, None


def envies(e, p, i, j):

    if i == j:
        raise ValueError("An agent cannot envy themselves (i = j = {0})".format(i))
    p = as_allocation(p, e.n)
    return not weak_sd(e.preferences[i], p[i, :], p[j, :])


def find_envy(e, p):

    """
    Returns:
        (envy free, first ordered pair (i, j) with i envying j, or None)
    """

    p = as_allocation(p, e.n)
    for i in range(e.n):
        for j in range(e.n):
            if i != j and not weak_sd(e.preferences[i], p[i, :], p[j, :]):
                return False, (i, j)
    return True, None


def satisfies_ETE(e, p):

    """
    Equal treatment of equals: agents with equal preferences and endowments get equal assignments

    Returns:
        (holds, lowest violating pair or None)
    """

    p = as_allocation(p, e.n)
    for group in equal_class_partition(e):
        for a in range(len(group)):
            for b in range(a + 1, len(group)):
                i, j = group[a], group[b]
                if tuple(p[i, :]) != tuple(p[j, :]):
                    return False, (i, j)
    return True, None


def satisfies_EENE(e, p):

    """
    Equal-endowment no envy: agents with equal endowments do not envy each other

    Returns:
        (holds, lowest ordered pair (i, j) with i envying j, or None)
    """

    p = as_allocation(p, e.n)
    pairs = []
    for group in equal_endowment_groups(e):
        pairs.extend((i, j) for i in group for j in group if i != j)
    for i, j in sorted(pairs):
        if not weak_sd(e.preferences[i], p[i, :], p[j, :]):
            return False, (i, j)
    return True, None


def allocation_dominates(e, p, q, strict=False):

    """
    p weakly dominates q for every agent (and, if strict, strictly for at least one)
    """

    p = as_allocation(p, e.n)
    q = as_allocation(q, e.n)
    if not all(weak_sd(e.preferences[i], p[i, :], q[i, :]) for i in range(e.n)):
        return False
    if strict:
        return any(strict_sd(e.preferences[i], p[i, :], q[i, :]) for i in range(e.n))
    return True


def allocation_lp(n, sense='max'):

    """
    LP over the n*n entries of a doubly stochastic matrix (variable i*n + o), rows and columns summing to 1
    """

    names = ['p{0},o{1}'.format(i + 1, o + 1) for i in range(n) for o in range(n)]
    lp = ratlp.LinearProgram(n * n, sense=sense, names=names)
    for i in range(n):
        lp.add_constraint(dict((i * n + o, 1) for o in range(n)), ratlp.EQ, 1, label='row{0}'.format(i + 1))
    for o in range(n):
        lp.add_constraint(dict((i * n + o, 1) for i in range(n)), ratlp.EQ, 1, label='col{0}'.format(o + 1))
    return lp


def is_sd_efficient(e, p):

    """
    sd-efficiency by LP: maximise the total of all prefix sums over allocations that weakly dominate p

    Args:
        e: Economy
        p: Allocation

    Returns:
        (efficient, None) or (False, the LP-optimal strictly dominating allocation)
    """

    n = e.n
    p = as_allocation(p, n)
    lp = allocation_lp(n)
    objective = {}
    baseline = Fraction(0)
    for i in range(n):
        pref = e.preferences[i]
        current = cum(pref, p[i, :])
        for t in range(n - 1):
            coefs = cum_coefficients(pref, t, offset=i * n)
            lp.add_constraint(coefs, ratlp.GE, current[t], label='sd{0},{1}'.format(i + 1, t + 1))
            for j, q in coefs.items():
                objective[j] = objective.get(j, 0) + q
            baseline += current[t]
    lp.set_objective(objective)
    out = ratlp.solve(lp)
    if out.value == baseline:
        return True, None
    q = object_matrix([out.x[i * n:(i + 1) * n] for i in range(n)])
    return False, q


def brute_force_dominator(e, p, step):

    """
    Searches the grid of doubly stochastic matrices with entries in multiples of step for one that strictly
    dominates p. Only meant for n <= 3 cross-checks.
    """

    p = as_allocation(p, e.n)
    for q in grid_allocations(e.n, step):
        if allocation_dominates(e, q, p, strict=True):
            return q
    return None


def grid_allocations(n, step):

    """
    Yields every doubly stochastic n x n matrix with entries in multiples of step (a Fraction 1/k)
    """

    k = int(1 / Fraction(step))
    unit = Fraction(1, k)

    def rows(remaining, i, acc):
        if i == n:
            if all(c == 0 for c in remaining):
                yield object_matrix(acc)
            return
        for row in compositions(k, n):
            if all(r <= c for r, c in zip(row, remaining)):
                # remaining column mass must still fit the rows left
                left = [c - r for c, r in zip(remaining, row)]
                if sum(left) == k * (n - i - 1):
                    for m in rows(left, i + 1, acc + [[unit * r for r in row]]):
                        yield m

    for m in rows([k] * n, 0, []):
        yield m


def compositions(total, parts):

    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest


def permutation_allocations(n):

    for perm in permutations(range(n)):
        yield object_matrix([[1 if perm[i] == o else 0 for o in range(n)] for i in range(n)])
