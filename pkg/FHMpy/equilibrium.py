"""
Walrasian equilibrium with slack and the weak-core ETE allocation built from it.

Agents get cardinal utilities consistent with their orders, and consume in relaxed consumption sets X^eps_i that
are close to being individually rational. Prices live in the subsimplex Delta = {P >= 0, sum(P) <= 1} and every
budget carries a uniform slack alpha. As eps shrinks, the symmetrised equilibrium allocations approach a weak-core
allocation that treats equals equally.

The price search runs in floating point with scipy. Whatever it produces is rounded to exact rationals and checked
with the exact predicates before being reported, so a failed search is reported as a failure and never as a
core allocation.
"""

import warnings
from fractions import Fraction
from timeit import default_timer as timer

import numpy as np
import pandas as pd
from scipy.optimize import linprog, minimize

from FHMpy import ratlp
from FHMpy.core import IR, ConstraintSet, build_constraints, in_weak_core
from FHMpy.dominance import cum, cum_coefficients, is_IR, satisfies_ETE, satisfies_EENE
from FHMpy.economy import as_allocation, equal_class_partition, object_name
from FHMpy.utils import ParseError, as_fraction, format_rational, format_row, object_matrix, parse_rational, \
    check_random_state


DEFAULT_TOL = 1e-9
DEFAULT_GAP_TOL = 1e-6
DEFAULT_MAXDEN = 64
MAX_MAXDEN = 4096
DEFAULT_SCHEDULE_LENGTH = 20
CONVERGENCE_THRESHOLD = 1e-6

TRACE_COLUMNS = ['eps', 'restart', 'iteration', 'phase', 'gap', 'residual', 'excess', 'alpha', 'step']


class RationalizationError(ValueError):
    pass


def _exact(x):

    if isinstance(x, float):
        return Fraction(x)
    return as_fraction(x)


class UtilityProfile():

    """
    Cardinal (von Neumann-Morgenstern) utilities u_{i,o} > 0, consistent with every agent's order

    Agents in the same equal class must have identical utility rows.

    Args:
        e: Economy the utilities belong to
        utilities: n x n exact rationals, row i for agent i

    """

    def __init__(self, e, utilities):

        u = object_matrix(utilities)
        if u.shape != (e.n, e.n):
            raise ValueError("Expected {0} x {0} utilities, got shape {1}".format(e.n, u.shape))
        problems = _utility_problems(e, u)
        if problems:
            raise ValueError("Invalid utility profile: {0}".format('; '.join(problems)))
        self.e = e
        self.u = u
        self.n = e.n

    def as_float(self):
        return np.array(self.u, dtype=float)

    def utility(self, i, x):
        return sum(self.u[i, o] * x[o] for o in range(self.n))

    def to_text(self):
        return '\n'.join(format_row(self.u[i, :]) for i in range(self.n)) + '\n'

    def __eq__(self, other):
        return isinstance(other, UtilityProfile) and bool((self.u == other.u).all())

    def __ne__(self, other):
        return not self.__eq__(other)

    def __repr__(self):
        return 'UtilityProfile(n={0})'.format(self.n)


def _utility_problems(e, u):

    out = []
    for i in range(e.n):
        pref = e.preferences[i]
        if any(u[i, o] <= 0 for o in range(e.n)):
            out.append("agent {0} has a non-positive utility".format(i + 1))
        for a, b in zip(pref, pref[1:]):
            if not u[i, a] > u[i, b]:
                out.append("agent {0} prefers {1} to {2} but u = {3} <= {4}".format(
                    i + 1, object_name(a), object_name(b), format_rational(u[i, a]), format_rational(u[i, b])))
    for group in equal_class_partition(e):
        for j in group[1:]:
            if tuple(u[j, :]) != tuple(u[group[0], :]):
                out.append("agents {0} and {1} are equals but have different utilities".format(group[0] + 1, j + 1))
    return out


def default_utilities(e):

    """
    Rank utilities: n + 1 - rank, with rank 1 for the favourite object
    """

    return UtilityProfile(e, [[e.n - e.ranks(i)[o] for o in range(e.n)] for i in range(e.n)])


def parse_utilities(text, e):

    """
    Parses n lines of n positive rationals ('#' starts a comment)

    Raises:
        ParseError: malformed numbers or wrong row count/length
        ValueError: utilities not consistent with the economy's orders or equal classes
    """

    rows = []
    for line_no, line in enumerate(text.splitlines(), 1):
        content = line.split('#', 1)[0]
        if not content.strip():
            continue
        row = []
        for token in content.split():
            row.append(parse_rational(token, line=line_no, column=content.index(token) + 1))
        if len(row) != e.n:
            raise ParseError("Expected {0} utilities, got {1}".format(e.n, len(row)), line=line_no)
        rows.append(row)
    if len(rows) != e.n:
        raise ParseError("Expected {0} utility rows, got {1}".format(e.n, len(rows)))
    return UtilityProfile(e, rows)


def consumption_constraints(e, i, eps):

    """
    The consumption space X^eps_i as linear rows over x_i (variables are objects)

    Nonnegativity is left to the variable bounds. Prefix rows whose right-hand side is not positive are implied by
    it and dropped.

    Args:
        e: Economy
        i: Agent
        eps: IR relaxation, eps >= 0 (Fraction, or float inside the solver)

    Returns:
        List of (coefficients dict, relation, rhs)
    """

    if eps < 0:
        raise ValueError("eps must be non-negative, got {0}".format(eps))
    pref = e.preferences[i]
    rows = [(dict((o, Fraction(1)) for o in range(e.n)), ratlp.LE, Fraction(1))]
    target = cum(pref, e.endowments[i, :])
    for t in range(e.n):
        rhs = target[t] - eps
        if rhs > 0:
            rows.append((cum_coefficients(pref, t), ratlp.GE, rhs))
    return rows


def _check_prices(P, alpha, n):

    if len(P) != n:
        raise ValueError("Expected {0} prices, got {1}".format(n, len(P)))
    if any(p < 0 for p in P) or sum(P) > 1:
        raise ValueError("Prices must be non-negative with sum at most 1")
    if alpha < 0:
        raise ValueError("Slack alpha must be non-negative, got {0}".format(alpha))


def demand(e, u, i, P, alpha, eps):

    """
    Agent i's utility-maximising bundle in X^eps_i within the budget P.x <= P.omega_i + alpha, solved exactly

    Ties are broken by maximising the share of the favourite object, then of the two best objects, and so on.

    Args:
        e: Economy
        u: UtilityProfile (None for rank utilities)
        i: Agent
        P: Prices, exact rationals in Delta
        alpha: Slack >= 0
        eps: IR relaxation >= 0

    Returns:
        Tuple of Fractions; may sum to less than 1
    """

    if u is None:
        u = default_utilities(e)
    n = e.n
    P = [_exact(p) for p in P]
    alpha, eps = _exact(alpha), _exact(eps)
    _check_prices(P, alpha, n)

    lp = ratlp.LinearProgram(n, 'max', names=['x{0},{1}'.format(i + 1, object_name(o)) for o in range(n)])
    for coefs, relation, rhs in consumption_constraints(e, i, eps):
        lp.add_constraint(coefs, relation, rhs)
    budget = sum((P[o] * e.endowments[i, o] for o in range(n)), Fraction(0)) + alpha
    lp.add_constraint(dict(enumerate(P)), ratlp.LE, budget, label='budget')

    utilities = dict((o, u.u[i, o]) for o in range(n))
    lp.set_objective(utilities)
    out = ratlp.solve(lp)
    lp.add_constraint(utilities, ratlp.GE, out.value, label='optimal')
    for t in range(n):
        coefs = cum_coefficients(e.preferences[i], t)
        lp.set_objective(coefs)
        out = ratlp.solve(lp)
        lp.add_constraint(coefs, ratlp.GE, out.value, label='tie{0}'.format(t + 1))
    return tuple(out.x)


def _simplex_projection(c):

    # min ||x - c||^2 s.t. sum(x) = 1, x >= 0
    a = -np.sort(-c)
    lambdas = (np.cumsum(a) - 1) / np.arange(1, len(c) + 1)
    k = np.nonzero(a > lambdas)[0][-1]
    return np.maximum(c - lambdas[k], 0)


def project_to_delta(P):

    """
    Euclidean projection onto Delta = {P >= 0, sum(P) <= 1}
    """

    P = np.asarray(P, dtype=float)
    clipped = np.maximum(P, 0)
    if clipped.sum() <= 1:
        return clipped
    return _simplex_projection(P)


def _residual(x, supply):
    return float(np.abs(x.sum(axis=0) - supply).max())


class WeSlack():

    """
    Result of a WE-slack search at one eps

    Args:
        x: Clearing allocation (float n x n) selected from the agents' budget sets
        P: Prices in Delta
        alpha: Budget slack
        eps: IR relaxation
        residual: max_o |sum_i x_{i,o} - supply_o|
        gap: Largest utility shortfall of x against the agents' optimal values
        converged: residual <= tol and gap <= gap_tol
        trace: pandas DataFrame with one row per evaluated price vector

    """

    def __init__(self, x, P, alpha, eps, residual, gap, converged, trace=None):
        self.x = x
        self.P = P
        self.alpha = alpha
        self.eps = eps
        self.residual = residual
        self.gap = gap
        self.converged = converged
        self.trace = trace if trace is not None else pd.DataFrame(columns=TRACE_COLUMNS)

    @property
    def status(self):
        return 'converged' if self.converged else 'failed'

    def to_lines(self):
        return ['eps: {0}'.format(format_rational(self.eps) if isinstance(self.eps, Fraction) else self.eps),
                'status: {0}'.format(self.status),
                'prices: {0}'.format(' '.join('{0:.6f}'.format(p) for p in self.P)),
                'alpha: {0:.6f}'.format(self.alpha),
                'residual: {0:.3e}'.format(self.residual),
                'gap: {0:.3e}'.format(self.gap)]

    def __repr__(self):
        return 'WeSlack(eps={0}, {1}, residual={2:.3e}, gap={3:.3e})'.format(self.eps, self.status, self.residual,
                                                                            self.gap)


class WeSlackSolver():

    """
    Searches prices and slack for a Walrasian equilibrium with slack

    Demands are float LPs (scipy HiGHS). A price vector is scored by clearing_gap: the smallest uniform utility
    shortfall over exactly clearing allocations drawn from the agents' budget sets, which is zero exactly at an
    equilibrium. Prices move by projected tatonnement, P <- proj(P + step * excess demand), with alpha = 1 - sum(P):
    (P, alpha) and (cP, c alpha) give the same budget sets for c > 0, so every equilibrium has a representative
    with sum(P) + alpha = 1. Stalled runs restart from random prices; if no run reaches gap_tol, Nelder-Mead polishes
    the best point over (P, alpha) jointly, with a larger budget for each round that still improves the gap.

    Args:
        e: Economy
        u: UtilityProfile, defaults to rank utilities
        tol: Largest accepted clearing residual
        gap_tol: Largest accepted utility shortfall
        max_iter: Tatonnement iterations per run
        restarts: Random restarts after the first run
        patience: Iterations without improvement before a run counts as stalled
        step: Initial tatonnement step, damped by 1 / log(iteration + 2)
        polish: Run Nelder-Mead when tatonnement falls short
        max_fev: Function evaluations allowed to the first Nelder-Mead round
        polish_rounds: Largest number of Nelder-Mead rounds
        seed: Seed for restart prices
        verbose: Print a line per eps

    """

    def __init__(self, e, u=None, tol=DEFAULT_TOL, gap_tol=DEFAULT_GAP_TOL, max_iter=60, restarts=2, patience=10,
                 step=0.5, polish=True, max_fev=150, polish_rounds=2, seed=None, verbose=False):

        if tol < 0 or gap_tol < 0:
            raise ValueError("Tolerances must be non-negative")
        if polish_rounds < 1:
            raise ValueError("Need at least one polish round, got {0}".format(polish_rounds))

        self.e = e
        self.n = e.n
        self.u = default_utilities(e) if u is None else u
        self.tol = tol
        self.gap_tol = gap_tol
        self.max_iter = max_iter
        self.restarts = restarts
        self.patience = patience
        self.step = step
        self.polish = polish
        self.max_fev = max_fev
        self.polish_rounds = polish_rounds
        self.rng = check_random_state(seed)
        self.verbose = verbose

        self._u = self.u.as_float()
        self._omega = np.array(e.endowments, dtype=float)
        self._supply = self._omega.sum(axis=0)
        self._rows = {}

    def _consumption(self, i, eps):

        key = (i, eps)
        if key not in self._rows:
            A, b = [], []
            for coefs, relation, rhs in consumption_constraints(self.e, i, eps):
                row = np.zeros(self.n)
                for o, q in coefs.items():
                    row[o] = float(q)
                sign = -1.0 if relation == ratlp.GE else 1.0
                A.append(sign * row)
                b.append(sign * float(rhs))
            self._rows[key] = (np.array(A), np.array(b))
        return self._rows[key]

    def demand(self, i, P, alpha, eps):

        n = self.n
        A, b = self._consumption(i, eps)
        A_ub = np.vstack([A, P])
        b_ub = np.append(b, P.dot(self._omega[i]) + alpha)
        res = linprog(-self._u[i], A_ub=A_ub, b_ub=b_ub, bounds=[(0, 1)] * n, method='highs')
        if res.status != 0:
            # omega_i is always feasible
            return self._omega[i].copy()
        return res.x

    def evaluate(self, P, alpha, eps):

        """
        Demands and the clearing gap at (P, alpha)

        Returns:
            (gap, clearing allocation, excess demand)
        """

        n = self.n
        demands = np.array([self.demand(i, P, alpha, eps) for i in range(n)])
        values = np.array([self._u[i].dot(demands[i]) for i in range(n)])
        excess = demands.sum(axis=0) - self._supply

        m = n * n + 1
        c = np.zeros(m)
        c[-1] = 1
        A_ub, b_ub = [], []
        for i in range(n):
            block = slice(i * n, (i + 1) * n)
            row = np.zeros(m)
            row[block] = -self._u[i]
            row[-1] = -1
            A_ub.append(row)
            b_ub.append(-values[i])
            row = np.zeros(m)
            row[block] = P
            A_ub.append(row)
            b_ub.append(P.dot(self._omega[i]) + alpha)
            A, b = self._consumption(i, eps)
            for a_row, rhs in zip(A, b):
                row = np.zeros(m)
                row[block] = a_row
                A_ub.append(row)
                b_ub.append(rhs)
        A_eq = np.zeros((n, m))
        for o in range(n):
            A_eq[o, [i * n + o for i in range(n)]] = 1
        bounds = [(0, 1)] * (n * n) + [(0, None)]
        res = linprog(c, A_ub=np.array(A_ub), b_ub=np.array(b_ub), A_eq=A_eq, b_eq=self._supply, bounds=bounds,
                      method='highs')
        if res.status != 0:
            return np.inf, self._omega.copy(), excess
        return max(float(res.fun), 0.0), res.x[:n * n].reshape(n, n), excess

    def clearing_gap(self, P, alpha, eps):
        gap, x, _ = self.evaluate(np.asarray(P, dtype=float), float(alpha), float(eps))
        return gap, x

    def _polish_objective(self, theta, eps):
        P = project_to_delta(theta[:self.n])
        return self.evaluate(P, float(np.clip(theta[self.n], 0, 1)), eps)[0]

    def solve(self, eps, start=None):

        """
        Runs the price search at one eps

        Args:
            eps: IR relaxation, eps > 0
            start: Optional starting prices (e.g. the previous eps's equilibrium prices)

        Returns:
            WeSlack
        """

        if eps <= 0:
            raise ValueError("WE-slack search needs eps > 0, got {0}".format(eps))
        eps_value = eps
        eps = float(eps)
        n = self.n
        start_time = timer()
        records = []
        best = None

        for restart in range(self.restarts + 1):
            if restart == 0:
                P = project_to_delta(start) if start is not None else np.ones(n) / n
            else:
                P = project_to_delta(self.rng.dirichlet(np.ones(n)) * self.rng.uniform(0.5, 1))
            run_best = np.inf
            stall = 0
            for it in range(self.max_iter):
                alpha = max(0.0, 1.0 - P.sum())
                gap, x, excess = self.evaluate(P, alpha, eps)
                step = self.step / np.log(it + 2)
                records.append(dict(eps=eps, restart=restart, iteration=it, phase='tatonnement', gap=gap,
                                    residual=_residual(x, self._supply), excess=float(np.abs(excess).max()),
                                    alpha=alpha, step=step))
                if best is None or gap < best[0]:
                    best = (gap, P.copy(), alpha, x)
                if gap <= self.gap_tol:
                    break
                if gap < run_best - self.gap_tol:
                    run_best = gap
                    stall = 0
                else:
                    stall += 1
                    if stall >= self.patience:
                        break
                P = project_to_delta(P + step * excess)
            if best[0] <= self.gap_tol:
                break

        for rnd in range(self.polish_rounds if self.polish else 0):
            if best[0] <= self.gap_tol:
                break
            # each round that still improves gets a larger budget
            res = minimize(self._polish_objective, np.append(best[1], best[2]), args=(eps,), method='Nelder-Mead',
                           options={'maxfev': self.max_fev * (rnd + 1), 'xatol': 1e-10, 'fatol': 1e-12})
            P = project_to_delta(res.x[:n])
            alpha = float(np.clip(res.x[n], 0, 1))
            gap, x, excess = self.evaluate(P, alpha, eps)
            records.append(dict(eps=eps, restart=-1 - rnd, iteration=int(res.nit), phase='nelder-mead', gap=gap,
                                residual=_residual(x, self._supply), excess=float(np.abs(excess).max()),
                                alpha=alpha, step=np.nan))
            if not gap < best[0]:
                break
            best = (gap, P, alpha, x)

        gap, P, alpha, x = best
        residual = _residual(x, self._supply)
        converged = residual <= self.tol and gap <= self.gap_tol
        if converged:
            # rounding noise of the LP; rescale columns onto the supply
            sums = x.sum(axis=0)
            x = x * np.where(sums > 0, self._supply / np.where(sums > 0, sums, 1), 1)

        if self.verbose:
            print("Finished eps = {0} in {1} seconds, gap {2:.3e}, residual {3:.3e}".format(
                eps_value, np.round(timer() - start_time, 3), gap, residual))

        return WeSlack(x, P, alpha, eps_value, residual, gap, converged,
                       trace=pd.DataFrame(records, columns=TRACE_COLUMNS))


def solve_we_slack(e, u=None, eps=Fraction(1, 2), tol=DEFAULT_TOL, start=None, **kwargs):

    """
    Walrasian equilibrium with slack at one eps; see WeSlackSolver for the keyword settings

    Returns:
        WeSlack (check .converged; a failed search carries its best residual and gap)
    """

    return WeSlackSolver(e, u, tol=tol, **kwargs).solve(eps, start=start)


def clearing_gap(e, u, eps, P, alpha):

    """
    Smallest uniform utility shortfall eta >= 0 over exactly clearing allocations with x_i in X^eps_i and within
    budget; eta = 0 iff (P, alpha) supports an equilibrium

    Returns:
        (eta, clearing allocation as a float matrix)
    """

    P = np.asarray(P, dtype=float)
    _check_prices(P, alpha, e.n)
    return WeSlackSolver(e, u).clearing_gap(P, alpha, eps)


def symmetrize(x, part):

    """
    Replaces each agent's row by the average over their equal class

    Works on exact (object) and float matrices alike; column sums are unchanged.

    Args:
        x: Allocation
        part: Equal class partition (tuple of agent groups)

    Returns:
        Matrix of the same kind as x
    """

    x = np.asarray(x)
    exact = x.dtype == object
    members = sorted(i for group in part for i in group)
    if members != list(range(x.shape[0])):
        raise ValueError("Partition {0} does not cover the {1} agents".format(part, x.shape[0]))
    out = np.array(x, dtype=object if exact else float)
    for group in part:
        g = list(group)
        if exact:
            out[g, :] = [sum(x[g, o], Fraction(0)) / len(g) for o in range(x.shape[1])]
        else:
            out[g, :] = x[g, :].mean(axis=0)
    if exact:
        return object_matrix(out)
    return out


def _class_equalities(part, n):

    rows = []
    for group in part:
        for j in group[1:]:
            for o in range(n):
                rows.append({group[0] * n + o: 1, j * n + o: -1})
    return rows


def rationalize(m, maxden=DEFAULT_MAXDEN, part=None, constraints=None):

    """
    Rounds an approximate allocation to an exact one

    Entries are replaced by their best rational approximation with denominator <= maxden and clamped to [0, 1];
    rows of each equal class in part are averaged. If the result misses the constraints (allocation constraints by
    default), it is replaced by the closest point in L1 distance that satisfies them with equal rows per class,
    found by an exact LP.

    Args:
        m: Approximate n x n matrix (floats or rationals)
        maxden: Largest denominator of the rounding
        part: Optional equal class partition whose rows must stay equal
        constraints: Optional ConstraintSet to repair into

    Returns:
        Read-only object matrix of Fractions

    Raises:
        RationalizationError: no matrix satisfies the constraints
    """

    if maxden < 1:
        raise ValueError("maxden must be at least 1, got {0}".format(maxden))
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("Expected a square matrix, got shape {0}".format(m.shape))
    n = m.shape[0]

    rounded = [[min(max(Fraction(_exact(x)).limit_denominator(maxden), Fraction(0)), Fraction(1))
                for x in row] for row in m.tolist()]
    r = object_matrix(rounded)
    if part is not None:
        r = symmetrize(r, part)
    c = constraints if constraints is not None else ConstraintSet(n)
    if c.n != n:
        raise ValueError("Constraints over {0} agents for a {1} x {1} matrix".format(c.n, n))
    equalities = _class_equalities(part, n) if part is not None else []

    if c.contains(r):
        return r

    # q - r = plus - minus, minimise sum(plus + minus)
    k = n * n
    lp = c.to_lp()
    repair = ratlp.LinearProgram(3 * k, 'min', names=lp.names + ['d+{0}'.format(j) for j in range(k)] +
                                 ['d-{0}'.format(j) for j in range(k)])
    repair.constraints = list(lp.constraints)
    for coefs in equalities:
        repair.add_constraint(coefs, ratlp.EQ, 0, label='class')
    flat = r.ravel()
    for j in range(k):
        repair.add_constraint({j: 1, k + j: -1, 2 * k + j: 1}, ratlp.EQ, flat[j], label='dist{0}'.format(j))
    repair.set_objective(dict((j, 1) for j in range(k, 3 * k)))
    out = ratlp.solve(repair)
    if not out.optimal:
        raise RationalizationError("No allocation satisfies the repair constraints")
    warnings.warn("Rationalization moved {0} of mass to restore the constraints".format(format_rational(out.value)))
    return object_matrix([out.x[i * n:(i + 1) * n] for i in range(n)])


def welfare_allocation(e, u=None, weights=None, part=None):

    """
    Exact maximiser of the weighted welfare sum_i w_i u_i . p_i over individually rational allocations

    A WE-slack allocation maximises welfare over X^eps with weights 1 / (marginal utility of money), so weighted
    welfare maxima over the IR allocations are exact candidates for the limit of the eps schedule.

    Args:
        e: Economy
        u: UtilityProfile, defaults to rank utilities
        weights: Positive weight per agent, defaults to all ones
        part: Optional equal class partition whose rows must stay equal

    Returns:
        Read-only object matrix of Fractions
    """

    n = e.n
    if u is None:
        u = default_utilities(e)
    weights = [Fraction(1)] * n if weights is None else [as_fraction(w) for w in weights]
    if len(weights) != n or any(w <= 0 for w in weights):
        raise ValueError("Expected {0} positive weights, got {1}".format(n, weights))

    objective = dict((i * n + o, weights[i] * u.u[i, o]) for i in range(n) for o in range(n))
    lp = build_constraints(e, [IR]).to_lp(objective)
    for coefs in (_class_equalities(part, n) if part is not None else []):
        lp.add_constraint(coefs, ratlp.EQ, 0, label='class')
    out = ratlp.solve(lp)
    if not out.optimal:
        raise ValueError("Welfare LP ended {0}; is the endowment a valid allocation?".format(out.status))
    return object_matrix([out.x[i * n:(i + 1) * n] for i in range(n)])


class EpsilonSchedule():

    """
    Strictly decreasing positive relaxations eps^1 > eps^2 > ...

    Args:
        values: The eps values, exact rationals

    """

    def __init__(self, values):

        values = tuple(_exact(v) for v in values)
        if not values:
            raise ValueError("An eps schedule needs at least one value")
        if any(v <= 0 for v in values):
            raise ValueError("eps values must be positive")
        if any(b >= a for a, b in zip(values, values[1:])):
            raise ValueError("eps values must be strictly decreasing")
        self.values = values

    @classmethod
    def geometric(cls, length=DEFAULT_SCHEDULE_LENGTH, ratio=Fraction(1, 2)):

        """
        eps^k = ratio^k for k = 1..length
        """

        ratio = _exact(ratio)
        if not 0 < ratio < 1:
            raise ValueError("Ratio must lie in (0, 1), got {0}".format(ratio))
        return cls([ratio ** k for k in range(1, length + 1)])

    def extension(self, extra):

        """
        The next `extra` values after this schedule, continuing its last ratio (halving for one value)
        """

        ratio = self.values[-1] / self.values[-2] if len(self.values) > 1 else Fraction(1, 2)
        return EpsilonSchedule([self.values[-1] * ratio ** k for k in range(1, extra + 1)])

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, k):
        return self.values[k]

    def __repr__(self):
        return 'EpsilonSchedule({0} values, last {1})'.format(len(self), format_rational(self.values[-1]))


class CoreVerification():

    """
    Exact verdicts for a candidate weak-core ETE allocation. EENE is informational and does not affect passed.
    """

    def __init__(self, allocation, ir, ete, membership, eene):
        self.allocation = allocation
        self.ir = ir
        self.ete = ete
        self.membership = membership
        self.eene = eene

    @property
    def passed(self):
        return self.ir[0] and self.ete[0] and self.membership.member

    def to_lines(self):

        def verdict(check, what):
            ok, where = check
            if ok:
                return 'pass'
            if isinstance(where, tuple):
                return 'fail ({0} {1})'.format(what, ', '.join(str(i + 1) for i in where))
            return 'fail ({0} {1})'.format(what, where + 1)

        out = ['IR: {0}'.format(verdict(self.ir, 'agent')),
               'ETE: {0}'.format(verdict(self.ete, 'agents')),
               'weak core: {0}'.format('member' if self.membership.member else 'non-member')]
        out.extend('  ' + line for line in self.membership.to_lines())
        out.append('EENE (informational): {0}'.format(verdict(self.eene, 'agents')))
        out.append('verified: {0}'.format('yes' if self.passed else 'no'))
        return out


def verify_weak_core_ETE(e, p, max_size=None):

    """
    Exact checks of a candidate: is_IR, satisfies_ETE, in_weak_core, plus satisfies_EENE for information

    Returns:
        CoreVerification
    """

    p = as_allocation(p, e.n)
    return CoreVerification(p, is_IR(e, p), satisfies_ETE(e, p), in_weak_core(e, p, max_size=max_size),
                            satisfies_EENE(e, p))


class FindCoreResult():

    """
    Outcome of find_weak_core_ETE

    Args:
        allocation: Verified exact allocation, or None on failure
        verification: CoreVerification of the last candidate checked (None if nothing could be rationalized)
        maxden: Denominator bound of the last rounding
        iterates: WeSlack results, one per eps solved
        source: 'equilibrium' or 'welfare', the stage that produced the allocation

    """

    def __init__(self, allocation, verification, maxden, iterates, source=None):
        self.allocation = allocation
        self.verification = verification
        self.maxden = maxden
        self.iterates = iterates
        self.source = source if allocation is not None else None

    @property
    def verified(self):
        return self.allocation is not None

    @property
    def trace(self):
        frames = [we.trace for we in self.iterates if len(we.trace)]
        if not frames:
            return pd.DataFrame(columns=TRACE_COLUMNS)
        return pd.concat(frames, ignore_index=True)

    def to_lines(self):

        out = ['status: {0}'.format('verified' if self.verified else 'failed')]
        if self.source is not None:
            out.append('source: {0}'.format(self.source))
        out.append('eps values solved: {0}'.format(len(self.iterates)))
        if self.iterates:
            last = self.iterates[-1]
            out.append('last eps: {0}'.format(format_rational(_exact(last.eps))))
            out.append('last solve: {0}'.format(last.status))
        out.append('maxden: {0}'.format(self.maxden))
        if self.verification is not None:
            out.extend(self.verification.to_lines())
        return out

    def __repr__(self):
        return 'FindCoreResult({0})'.format('verified' if self.verified else 'failed')


def _run_schedule(solver, schedule, part, threshold, iterates, verbose):

    candidate = None
    previous = None
    for eps in schedule:
        start = iterates[-1].P if iterates else None
        we = solver.solve(eps, start=start)
        if not we.converged:
            warnings.warn("WE-slack search at eps = {0} did not converge (gap {1:.3e}, residual {2:.3e})".format(
                format_rational(eps), we.gap, we.residual))
        iterates.append(we)
        y = symmetrize(we.x, part)
        if previous is not None and we.converged and previous[1] and np.abs(y - previous[0]).max() < threshold:
            candidate = y
            if verbose:
                print("Iterates settled at eps = {0}".format(format_rational(eps)))
            break
        previous = (y, we.converged)
        candidate = y
    return candidate


def _extract(e, candidate, part, maxden, max_maxden, max_size, verbose):

    target = build_constraints(e, [IR])
    den = maxden
    verification = None
    while den <= max_maxden:
        try:
            p = rationalize(candidate, den, part, constraints=target)
        except RationalizationError as err:
            warnings.warn("maxden {0}: {1}".format(den, err))
            den *= 2
            continue
        verification = verify_weak_core_ETE(e, p, max_size=max_size)
        if verification.passed:
            return p, verification, den
        if verbose:
            print("Candidate at maxden {0} failed verification".format(den))
        if den * 2 <= max_maxden:
            warnings.warn("Candidate at maxden {0} failed verification, retrying with {1}".format(den, den * 2))
        den *= 2
    return None, verification, den // 2


def _welfare_search(e, u, part, tries, seed, max_size, verbose):

    # equal weights first, then seeded integer weights shared within each equal class
    rng = check_random_state(seed)
    seen = []
    verification = None
    for k in range(tries):
        weights = [1] * e.n
        if k > 0:
            for group, w in zip(part, rng.randint(1, 9, size=len(part))):
                for i in group:
                    weights[i] = int(w)
        p = welfare_allocation(e, u, weights, part)
        if any((p == q).all() for q in seen):
            continue
        seen.append(p)
        verification = verify_weak_core_ETE(e, p, max_size=max_size)
        if verification.passed:
            if verbose:
                print("Welfare maximum for weights {0} verified".format(weights))
            return p, verification
    return None, verification


def find_weak_core_ETE(e, schedule=None, maxden=DEFAULT_MAXDEN, u=None, tol=DEFAULT_TOL, gap_tol=DEFAULT_GAP_TOL,
                       seed=None, max_maxden=MAX_MAXDEN, extend=5, threshold=CONVERGENCE_THRESHOLD, max_size=None,
                       welfare_tries=8, verbose=False, **solver_kwargs):

    """
    Computes a weak-core allocation satisfying equal treatment of equals

    For each eps in the schedule a WE-slack is computed (warm-started from the previous prices) and symmetrised
    over equal classes. Once successive iterates agree within threshold, or the schedule runs out, the final
    iterate is rationalized and checked exactly. Failed checks retry with doubled maxden up to max_maxden. If no
    rounding passes, exact weighted welfare maxima over the IR allocations (welfare_allocation) are checked, and
    as a last resort the schedule is extended by `extend` values.

    Args:
        e: Economy
        schedule: EpsilonSchedule, defaults to 2^-k for k = 1..20
        maxden: First denominator bound of the rounding
        u: UtilityProfile, defaults to rank utilities
        tol: Clearing residual tolerance of the solver
        gap_tol: Utility shortfall tolerance of the solver
        seed: Seed for solver restarts
        max_maxden: Largest denominator bound tried
        extend: Extra eps values tried after a failure (0 to disable)
        threshold: Max-norm distance at which successive iterates count as settled
        max_size: Largest coalition checked by the weak-core test (default n)
        welfare_tries: Welfare weight vectors tried after the rounding fails (0 to disable)
        verbose: Print progress

    Returns:
        FindCoreResult; .allocation is None unless every exact check passed
    """

    start_time = timer()
    if schedule is None:
        schedule = EpsilonSchedule.geometric()
    if maxden < 1 or max_maxden < maxden:
        raise ValueError("Need 1 <= maxden <= max_maxden, got {0} and {1}".format(maxden, max_maxden))

    part = equal_class_partition(e)
    solver = WeSlackSolver(e, u, tol=tol, gap_tol=gap_tol, seed=seed, verbose=verbose, **solver_kwargs)
    iterates = []

    candidate = _run_schedule(solver, schedule, part, threshold, iterates, verbose)
    p, verification, den = _extract(e, candidate, part, maxden, max_maxden, max_size, verbose)
    source = 'equilibrium'

    if p is None and welfare_tries > 0:
        warnings.warn("Equilibrium candidate failed verification, trying weighted welfare maxima")
        p, welfare_verification = _welfare_search(e, u, part, welfare_tries, seed, max_size, verbose)
        if p is not None:
            verification = welfare_verification
            source = 'welfare'

    if p is None and extend > 0:
        warnings.warn("No verified allocation after {0} eps values, extending the schedule by {1}".format(
            len(iterates), extend))
        more = EpsilonSchedule([iterates[-1].eps]).extension(extend)
        candidate = _run_schedule(solver, more, part, threshold, iterates, verbose)
        p, verification, den = _extract(e, candidate, part, maxden, max_maxden, max_size, verbose)

    if verbose:
        print("Finished in {0} seconds, {1}".format(np.round(timer() - start_time, 3),
                                                    'verified' if p is not None else 'failed'))

    return FindCoreResult(p, verification, den, iterates, source)


def budget_diagnostic(e, u, we, certificate):

    """
    Budget check of a blocking candidate against an equilibrium

    For each coalition member: the utility gain of the certificate row over the equilibrium bundle, and how far the
    row's cost exceeds the member's budget. When every member gains, the excesses should sum to a positive number,
    since the coalition only redistributes its own endowments.

    Args:
        e: Economy
        u: UtilityProfile (None for rank utilities)
        we: WeSlack
        certificate: BlockCertificate

    Returns:
        pandas DataFrame with columns agent, utility_gain, budget_excess
    """

    if u is None:
        u = default_utilities(e)
    uf = u.as_float()
    P = np.asarray(we.P, dtype=float)
    x = np.asarray(we.x, dtype=float)
    omega = np.array(e.endowments, dtype=float)
    rows = []
    for i in certificate.coalition:
        new = np.array([float(v) for v in certificate.rows[i]])
        rows.append(dict(agent=i + 1, utility_gain=uf[i].dot(new) - uf[i].dot(x[i]),
                         budget_excess=P.dot(new) - (P.dot(omega[i]) + we.alpha)))
    return pd.DataFrame(rows, columns=['agent', 'utility_gain', 'budget_excess'])
