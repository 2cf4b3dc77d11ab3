"""
Exact rational linear programming with certificates.

Two-phase simplex over Fractions with Bland's rule. Every outcome carries a certificate that check_certificate
re-verifies independently:

* optimal: primal point x and duals y (one per row of LinearProgram.rows()) with A^T y = c', b.y = c'.x
* infeasible: Farkas vector f with A^T f = 0 and b.f < 0
* unbounded: feasible x and a ray d with c'.d > 0

where c' = c when maximising and -c when minimising. Dual signs: rows with <= carry y >= 0, rows with >= carry
y <= 0, equality rows are free.
"""

from collections import namedtuple
from fractions import Fraction

from FHMpy.utils import as_fraction, format_rational


LE, EQ, GE = '<=', '==', '>='
RELATIONS = (LE, EQ, GE)

OPTIMAL, INFEASIBLE, UNBOUNDED = 'optimal', 'infeasible', 'unbounded'

# When True every solve re-checks its own certificate (the test suite turns this on)
VERIFY_CERTIFICATES = False


class CertificateError(ArithmeticError):
    pass


Row = namedtuple('Row', ['coefs', 'relation', 'rhs', 'label', 'kind', 'var'])


def _sparse(coefs, n_vars):

    if isinstance(coefs, dict):
        items = coefs.items()
    else:
        coefs = list(coefs)
        if len(coefs) != n_vars:
            raise ValueError("Coefficient vector has length {0}, expected {1}".format(len(coefs), n_vars))
        items = enumerate(coefs)

    out = {}
    for j, q in items:
        j = int(j)
        if j < 0 or j >= n_vars:
            raise ValueError("Variable index {0} outside 0..{1}".format(j, n_vars - 1))
        q = as_fraction(q)
        if q != 0:
            out[j] = out.get(j, 0) + q
            if out[j] == 0:
                del out[j]
    return out


class LinearProgram():

    """
    An LP instance over exact rationals

    Variables default to the bounds 0 <= x_j (no upper bound); use set_bounds to change them, with lower=None for
    a free variable.

    Args:
        n_vars: Number of variables
        sense: 'max' or 'min'
        names: Optional variable names used by dump()

    """

    def __init__(self, n_vars, sense='max', names=None):

        if n_vars < 0:
            raise ValueError("Number of variables must be non-negative")
        if sense not in ('max', 'min'):
            raise ValueError("Sense should be 'max' or 'min', got {0}".format(sense))

        self.n_vars = n_vars
        self.sense = sense
        self.names = list(names) if names is not None else ['x{0}'.format(j + 1) for j in range(n_vars)]
        self.objective = {}
        self.constraints = []
        self.lower = [Fraction(0)] * n_vars
        self.upper = [None] * n_vars

    def add_constraint(self, coefs, relation, rhs, label=None):

        """
        Adds a row coefs . x (relation) rhs

        Args:
            coefs: Dense sequence of length n_vars or a sparse dict {variable index: coefficient}
            relation: One of '<=', '==', '>='
            rhs: Right-hand side
            label: Optional row label for reports and dumps

        Returns:
            Index of the new row
        """

        if relation not in RELATIONS:
            raise ValueError("Relation should be one of {0}, got {1}".format(RELATIONS, relation))
        self.constraints.append(Row(_sparse(coefs, self.n_vars), relation, as_fraction(rhs), label,
                                    'constraint', None))
        return len(self.constraints) - 1

    def set_objective(self, coefs, sense=None):

        self.objective = _sparse(coefs, self.n_vars)
        if sense is not None:
            if sense not in ('max', 'min'):
                raise ValueError("Sense should be 'max' or 'min', got {0}".format(sense))
            self.sense = sense

    def set_bounds(self, j, lower=0, upper=None):

        self.lower[j] = None if lower is None else as_fraction(lower)
        self.upper[j] = None if upper is None else as_fraction(upper)

    def rows(self):

        """
        All rows the certificates refer to: the constraints in insertion order, then for each variable its lower
        bound row (x_j >= lower) and upper bound row (x_j <= upper) where present
        """

        out = list(self.constraints)
        for j in range(self.n_vars):
            if self.lower[j] is not None:
                out.append(Row({j: Fraction(1)}, GE, self.lower[j], None, 'lower', j))
            if self.upper[j] is not None:
                out.append(Row({j: Fraction(1)}, LE, self.upper[j], None, 'upper', j))
        return out

    def objective_value(self, x):
        return sum((q * x[j] for j, q in self.objective.items()), Fraction(0))

    def copy(self):

        lp = LinearProgram(self.n_vars, self.sense, self.names)
        lp.objective = dict(self.objective)
        lp.constraints = list(self.constraints)
        lp.lower = list(self.lower)
        lp.upper = list(self.upper)
        return lp


class LpOutcome():

    """
    Result of solve(); see the module docstring for the certificate conventions

    Args:
        status: 'optimal', 'infeasible' or 'unbounded'
        value: Optimal objective value (optimal only)
        x: Primal point (optimal and unbounded)
        duals: Dual vector over LinearProgram.rows() (optimal only)
        farkas: Farkas vector over LinearProgram.rows() (infeasible only)
        ray: Improving direction (unbounded only)
        pivots: Number of pivots performed

    """

    def __init__(self, status, value=None, x=None, duals=None, farkas=None, ray=None, pivots=0):
        self.status = status
        self.value = value
        self.x = x
        self.duals = duals
        self.farkas = farkas
        self.ray = ray
        self.pivots = pivots

    @property
    def optimal(self):
        return self.status == OPTIMAL

    @property
    def infeasible(self):
        return self.status == INFEASIBLE

    @property
    def unbounded(self):
        return self.status == UNBOUNDED

    def __eq__(self, other):
        return isinstance(other, LpOutcome) and (self.status, self.value, self.x, self.duals, self.farkas,
                                                 self.ray) == (other.status, other.value, other.x, other.duals,
                                                               other.farkas, other.ray)

    def __ne__(self, other):
        return not self.__eq__(other)

    def __repr__(self):
        if self.optimal:
            return 'LpOutcome(optimal, value={0})'.format(format_rational(self.value))
        return 'LpOutcome({0})'.format(self.status)


def _pivot(T, d, basis, r, col):

    prow = T[r]
    piv = prow[col]
    if piv != 1:
        prow = [v / piv if v else 0 for v in prow]
        T[r] = prow
    nz = [j for j, v in enumerate(prow) if v]
    for rr, row in enumerate(T):
        if rr != r:
            f = row[col]
            if f:
                for j in nz:
                    row[j] -= f * prow[j]
    f = d[col]
    if f:
        for j in nz:
            d[j] -= f * prow[j]
    basis[r] = col


def _entering(d, limit):

    for j in range(limit):
        if d[j] > 0:
            return j
    return None


def _leaving(T, basis, col, rhs):

    best, best_ratio = None, None
    for r, row in enumerate(T):
        a = row[col]
        if a > 0:
            ratio = row[rhs] / a
            if best is None or ratio < best_ratio or (ratio == best_ratio and basis[r] < basis[best]):
                best, best_ratio = r, ratio
    return best


def solve(lp):

    """
    Solves an LP exactly

    Deterministic for a fixed instance: lowest-index entering column, ratio ties broken by lowest basic index.

    Args:
        lp: LinearProgram

    Returns:
        LpOutcome with certificate
    """

    n = lp.n_vars
    rows = lp.rows()
    sign = 1 if lp.sense == 'max' else -1
    cprime = [sign * lp.objective.get(j, 0) for j in range(n)]
    lo = lp.lower

    # structural columns: shifted x_j - lo_j, or u - v for free variables
    columns = []
    for j in range(n):
        columns.append((j, 1))
        if lo[j] is None:
            columns.append((j, -1))
    n_struct = len(columns)

    tab_rows = [k for k, row in enumerate(rows) if row.kind != 'lower']
    n_slack = sum(1 for k in tab_rows if rows[k].relation != EQ)
    m = len(tab_rows)
    art_start = n_struct + n_slack
    N = art_start + m

    T = []
    flips = []
    s = n_struct
    for r, k in enumerate(tab_rows):
        row = rows[k]
        line = [0] * (N + 1)
        for c, (j, sgn) in enumerate(columns):
            a = row.coefs.get(j)
            if a:
                line[c] = sgn * a
        b = row.rhs - sum((a * lo[j] for j, a in row.coefs.items() if lo[j] is not None), Fraction(0))
        if row.relation != EQ:
            line[s] = Fraction(1) if row.relation == LE else Fraction(-1)
            s += 1
        flip = -1 if b < 0 else 1
        if flip < 0:
            line = [-v if v else 0 for v in line]
            b = -b
        line[art_start + r] = Fraction(1)
        line[N] = b
        T.append(line)
        flips.append(flip)

    basis = [art_start + r for r in range(m)]
    pivots = 0

    # phase I: maximise -sum(artificials)
    d = [0] * (N + 1)
    for line in T:
        for j in range(art_start):
            if line[j]:
                d[j] += line[j]
        d[N] += line[N]

    while True:
        col = _entering(d, art_start)
        if col is None:
            break
        r = _leaving(T, basis, col, N)
        _pivot(T, d, basis, r, col)
        pivots += 1

    if d[N] > 0:
        # y_k = -1 - d_art_k in flipped orientation
        g = [Fraction(flips[r] * (-1 - d[art_start + r])) for r in range(m)]
        farkas = _expand(rows, tab_rows, g, n, lambda j, atg: -atg)
        return _checked(lp, LpOutcome(INFEASIBLE, farkas=tuple(farkas), pivots=pivots))

    # drive zero-level artificials out where a structural or slack column allows it
    for r in range(m):
        if basis[r] >= art_start:
            for j in range(art_start):
                if T[r][j]:
                    _pivot(T, d, basis, r, j)
                    pivots += 1
                    break

    # phase II
    ctilde = [sgn * cprime[j] for (j, sgn) in columns] + [0] * (n_slack + m)
    d = list(ctilde) + [0]
    for r, line in enumerate(T):
        cb = ctilde[basis[r]]
        if cb:
            for j in range(N + 1):
                if line[j]:
                    d[j] -= cb * line[j]

    while True:
        col = _entering(d, art_start)
        if col is None:
            break
        r = _leaving(T, basis, col, N)
        if r is None:
            w = _primal(T, basis, N)
            x = _to_x(w, columns, lo, n)
            dw = [0] * N
            dw[col] = 1
            for rr in range(m):
                if T[rr][col]:
                    dw[basis[rr]] = -T[rr][col]
            ray = [Fraction(0)] * n
            for c, (j, sgn) in enumerate(columns):
                if dw[c]:
                    ray[j] += sgn * dw[c]
            return _checked(lp, LpOutcome(UNBOUNDED, x=tuple(x), ray=tuple(ray), pivots=pivots))
        _pivot(T, d, basis, r, col)
        pivots += 1

    w = _primal(T, basis, N)
    x = _to_x(w, columns, lo, n)
    y = [Fraction(flips[r] * -d[art_start + r]) for r in range(m)]
    duals = _expand(rows, tab_rows, y, n, lambda j, aty: cprime[j] - aty)
    return _checked(lp, LpOutcome(OPTIMAL, value=lp.objective_value(x), x=tuple(x), duals=tuple(duals),
                                  pivots=pivots))


def _primal(T, basis, N):

    w = [0] * N
    for r, b in enumerate(basis):
        w[b] = T[r][N]
    return w


def _to_x(w, columns, lo, n):

    x = [Fraction(0) if lo[j] is None else lo[j] for j in range(n)]
    for c, (j, sgn) in enumerate(columns):
        if w[c]:
            x[j] += sgn * w[c]
    return [Fraction(v) for v in x]


def _expand(rows, tab_rows, values, n, lower_value):

    # Spreads tableau-row multipliers over rows(); lower-bound rows absorb the remaining column balance.
    full = [Fraction(0)] * len(rows)
    aty = [Fraction(0)] * n
    for r, k in enumerate(tab_rows):
        full[k] = values[r]
        if values[r]:
            for j, a in rows[k].coefs.items():
                aty[j] += a * values[r]
    for k, row in enumerate(rows):
        if row.kind == 'lower':
            full[k] = Fraction(lower_value(row.var, aty[row.var]))
    return full


def _checked(lp, outcome):

    if VERIFY_CERTIFICATES and not check_certificate(lp, outcome):
        raise CertificateError("Certificate for {0} outcome failed verification".format(outcome.status))
    return outcome


def _row_activity(row, x):
    return sum((a * x[j] for j, a in row.coefs.items()), Fraction(0))


def _satisfied(relation, lhs, rhs):

    if relation == LE:
        return lhs <= rhs
    if relation == GE:
        return lhs >= rhs
    return lhs == rhs


def _sign_ok(relation, y):

    if relation == LE:
        return y >= 0
    if relation == GE:
        return y <= 0
    return True


def _transpose_product(rows, y, n):

    out = [Fraction(0)] * n
    for row, v in zip(rows, y):
        if v:
            for j, a in row.coefs.items():
                out[j] += a * v
    return out


def check_certificate(lp, out):

    """
    Independently verifies an outcome by substitution and duality identities

    Args:
        lp: The LinearProgram that was solved
        out: An LpOutcome for it

    Returns:
        True iff the certificate proves the outcome
    """

    rows = lp.rows()
    n = lp.n_vars
    sign = 1 if lp.sense == 'max' else -1
    cprime = [sign * lp.objective.get(j, 0) for j in range(n)]

    def vector(v, length, what):
        if v is None:
            raise ValueError("{0} outcome has no {1}".format(out.status, what))
        if len(v) != length:
            raise ValueError("{0} has length {1}, expected {2}".format(what, len(v), length))
        return [as_fraction(q) for q in v]

    if out.status == OPTIMAL:
        x = vector(out.x, n, 'primal point')
        y = vector(out.duals, len(rows), 'dual vector')
        if not all(_satisfied(row.relation, _row_activity(row, x), row.rhs) for row in rows):
            return False
        if out.value != lp.objective_value(x):
            return False
        if not all(_sign_ok(row.relation, v) for row, v in zip(rows, y)):
            return False
        if _transpose_product(rows, y, n) != cprime:
            return False
        return sum((row.rhs * v for row, v in zip(rows, y)), Fraction(0)) == \
            sum((c * xj for c, xj in zip(cprime, x)), Fraction(0))

    if out.status == INFEASIBLE:
        f = vector(out.farkas, len(rows), 'Farkas vector')
        if not all(_sign_ok(row.relation, v) for row, v in zip(rows, f)):
            return False
        if any(_transpose_product(rows, f, n)):
            return False
        return sum((row.rhs * v for row, v in zip(rows, f)), Fraction(0)) < 0

    if out.status == UNBOUNDED:
        x = vector(out.x, n, 'primal point')
        ray = vector(out.ray, n, 'ray')
        if not all(_satisfied(row.relation, _row_activity(row, x), row.rhs) for row in rows):
            return False
        if not all(_satisfied(row.relation, _row_activity(row, ray), 0) for row in rows):
            return False
        return sum((c * v for c, v in zip(cprime, ray)), Fraction(0)) > 0

    raise ValueError("Unknown outcome status {0}".format(out.status))


def _term(q, name, first):

    q = Fraction(q)
    if first:
        return ('- ' if q < 0 else '') + format_rational(abs(q)) + ' ' + name
    return ('- ' if q < 0 else '+ ') + format_rational(abs(q)) + ' ' + name


def _expression(coefs, names):

    if not coefs:
        return '0'
    return ' '.join(_term(q, names[j], i == 0) for i, (j, q) in enumerate(sorted(coefs.items())))


def dump(lp):

    """
    Plain-text rendering of an LP instance for bug reports
    """

    out = ['{0}imize {1}'.format(lp.sense, _expression(lp.objective, lp.names)), 'subject to']
    for k, row in enumerate(lp.constraints):
        label = row.label if row.label is not None else 'c{0}'.format(k + 1)
        out.append('  {0}: {1} {2} {3}'.format(label, _expression(row.coefs, lp.names), row.relation,
                                               format_rational(row.rhs)))
    out.append('bounds')
    for j in range(lp.n_vars):
        low = '-inf' if lp.lower[j] is None else format_rational(lp.lower[j])
        high = 'inf' if lp.upper[j] is None else format_rational(lp.upper[j])
        out.append('  {0} <= {1} <= {2}'.format(low, lp.names[j], high))
    return '\n'.join(out) + '\n'
