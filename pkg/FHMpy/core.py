"""
Core membership, polytope certification tools and top trading cycles.
"""

from fractions import Fraction

from FHMpy import ratlp
from FHMpy.blocking import search_blocking_coalitions, WEAK, STRONG
from FHMpy.dominance import cum, cum_coefficients, is_IR
from FHMpy.economy import as_allocation, equal_endowment_groups, object_name
from FHMpy.utils import (object_matrix, format_rational, format_row, check_random_state,
                         random_doubly_stochastic)


IR, EENE = 'IR', 'EENE'
ORIGINS = ('allocation', IR, EENE, 'custom')


class ConstraintSet():

    """
    Linear constraints over the allocation variables p_{i,o} (variable i*n + o), each tagged with its origin

    The doubly stochastic allocation constraints are always present.

    Args:
        n: Number of agents and objects

    """

    def __init__(self, n):

        self.n = n
        self.constraints = []
        for i in range(n):
            self.add(dict((i * n + o, 1) for o in range(n)), ratlp.EQ, 1, 'allocation', 'row{0}'.format(i + 1))
        for o in range(n):
            self.add(dict((i * n + o, 1) for i in range(n)), ratlp.EQ, 1, 'allocation',
                     'col{0}'.format(o + 1))

    def add(self, coefs, relation, rhs, origin='custom', label=None):

        if origin not in ORIGINS:
            raise ValueError("Origin should be one of {0}, got {1}".format(ORIGINS, origin))
        if relation not in ratlp.RELATIONS:
            raise ValueError("Relation should be one of {0}, got {1}".format(ratlp.RELATIONS, relation))
        coefs = dict((int(j), Fraction(q)) for j, q in coefs.items() if q != 0)
        if any(j < 0 or j >= self.n * self.n for j in coefs):
            raise ValueError("Constraint references a variable outside the {0} x {0} allocation".format(self.n))
        self.constraints.append((coefs, relation, Fraction(rhs), origin, label))

    def add_assignment(self, i, row, origin='custom'):

        """
        Constraints p_i = row, one equality per object
        """

        for o, v in enumerate(row):
            self.add({i * self.n + o: 1}, ratlp.EQ, v, origin, 'p{0},{1}'.format(i + 1, object_name(o)))

    def origins(self):
        return [c[3] for c in self.constraints]

    def copy(self):

        c = ConstraintSet.__new__(ConstraintSet)
        c.n = self.n
        c.constraints = list(self.constraints)
        return c

    def contains(self, p):

        """
        Whether allocation p satisfies every constraint exactly
        """

        p = as_allocation(p, self.n)
        flat = p.ravel()
        for coefs, relation, rhs, _, _ in self.constraints:
            lhs = sum((q * flat[j] for j, q in coefs.items()), Fraction(0))
            if relation == ratlp.LE and not lhs <= rhs:
                return False
            if relation == ratlp.GE and not lhs >= rhs:
                return False
            if relation == ratlp.EQ and lhs != rhs:
                return False
        return True

    def to_lp(self, objective=None, sense='max'):

        n = self.n
        names = ['p{0},o{1}'.format(i + 1, o + 1) for i in range(n) for o in range(n)]
        lp = ratlp.LinearProgram(n * n, sense=sense, names=names)
        for coefs, relation, rhs, origin, label in self.constraints:
            lp.add_constraint(coefs, relation, rhs, label=label or origin)
        if objective is not None:
            lp.set_objective(objective)
        return lp

    def __len__(self):
        return len(self.constraints)

    def __repr__(self):
        return 'ConstraintSet(n={0}, {1} constraints)'.format(self.n, len(self.constraints))


def build_constraints(e, tags=()):

    """
    Allocation constraints plus the linear consequences of IR and/or EENE

    Args:
        e: Economy
        tags: Any of 'IR', 'EENE'

    Returns:
        ConstraintSet
    """

    tags = set(tags)
    unknown = tags - {IR, EENE}
    if unknown:
        raise ValueError("Unknown constraint tags {0}, expected IR and/or EENE".format(sorted(unknown)))

    n = e.n
    c = ConstraintSet(n)

    if IR in tags:
        for i in range(n):
            pref = e.preferences[i]
            target = cum(pref, e.endowments[i, :])
            for t in range(n - 1):
                c.add(cum_coefficients(pref, t, offset=i * n), ratlp.GE, target[t], IR,
                      'IR{0},{1}'.format(i + 1, t + 1))

    if EENE in tags:
        for group in equal_endowment_groups(e):
            for i in group:
                for j in group:
                    if i == j:
                        continue
                    pref = e.preferences[i]
                    for t in range(n - 1):
                        coefs = cum_coefficients(pref, t, offset=i * n)
                        for o in pref[:t + 1]:
                            coefs[j * n + o] = Fraction(-1)
                        c.add(coefs, ratlp.GE, 0, EENE, 'EENE{0},{1},{2}'.format(i + 1, j + 1, t + 1))

    return c


def parse_tags(text):

    """
    'IR', 'IR+EENE', 'EENE' or 'none' to a tuple of tags
    """

    if text.strip().lower() in ('none', ''):
        return ()
    tags = tuple(t.strip() for t in text.split('+'))
    for t in tags:
        if t not in (IR, EENE):
            raise ValueError("Unknown constraint tag '{0}'".format(t))
    return tags


def functional_coefficients(n, f):

    """
    Converts a functional {(i, o): coefficient} to sparse LP coefficients
    """

    out = {}
    for (i, o), q in f.items():
        if not (0 <= i < n and 0 <= o < n):
            raise ValueError("Functional term p{0},o{1} outside the {2} x {2} allocation".format(i + 1, o + 1, n))
        out[i * n + o] = out.get(i * n + o, 0) + Fraction(q)
    return out


def format_functional(f):

    terms = []
    for (i, o), q in sorted(f.items()):
        name = 'p{0},o{1}'.format(i + 1, o + 1)
        terms.append(name if q == 1 else '{0}*{1}'.format(format_rational(q), name))
    return '+'.join(terms)


class ForcedBounds():

    """
    Exact minimum and maximum of a linear functional over a constraint set, with the two LP outcomes
    """

    def __init__(self, functional, min_outcome, max_outcome):
        self.functional = functional
        self.min_outcome = min_outcome
        self.max_outcome = max_outcome

    @property
    def infeasible(self):
        return self.min_outcome.infeasible

    @property
    def min(self):
        return self.min_outcome.value if self.min_outcome.optimal else None

    @property
    def max(self):
        return self.max_outcome.value if self.max_outcome.optimal else None

    @property
    def forced(self):
        return not self.infeasible and self.min == self.max

    def __repr__(self):
        if self.infeasible:
            return 'ForcedBounds(infeasible)'
        return 'ForcedBounds({0}, {1})'.format(format_rational(self.min), format_rational(self.max))


def forced_bounds(c, f):

    """
    Minimises and maximises a functional over a constraint set

    Args:
        c: ConstraintSet
        f: Functional as a dict {(agent, object): coefficient}

    Returns:
        ForcedBounds; when c is infeasible both outcomes carry Farkas certificates
    """

    coefs = functional_coefficients(c.n, f)
    low = ratlp.solve(c.to_lp(coefs, 'min'))
    high = ratlp.solve(c.to_lp(coefs, 'max'))
    return ForcedBounds(f, low, high)


def dominates_over_polytope(e, c, i, b):

    """
    Whether bundle b weakly dominates agent i's assignment in every allocation of c

    For each prefix t the gap is cum(b)_t minus the largest prefix share agent i can get in c.

    Args:
        e: Economy
        c: ConstraintSet
        i: Agent
        b: Assignment for agent i

    Returns:
        (all gaps >= 0, tuple of gaps)
    """

    n = e.n
    if len(b) != n:
        raise ValueError("Bundle has {0} entries, expected {1}".format(len(b), n))
    pref = e.preferences[i]
    target = cum(pref, [Fraction(x) for x in b])
    gaps = []
    for t in range(n):
        out = ratlp.solve(c.to_lp(cum_coefficients(pref, t, offset=i * n), 'max'))
        if not out.optimal:
            raise ValueError("Constraint set is infeasible; no prefix bound for agent {0}".format(i + 1))
        gaps.append(target[t] - out.value)
    gaps = tuple(gaps)
    return all(g >= 0 for g in gaps), gaps


class UniformBlockCertificate():

    """
    Outcome of certify_uniform_strong_block

    Attributes:
        certified: True when every allocation in the constraint set is strongly blocked by the coalition via rows
        gaps: Dict agent -> per-prefix gaps
        strict: Dict agent -> prefixes (0-based) with a positive gap
        failure: Description of the first failing member, or None
    """

    def __init__(self, coalition, rows, gaps, strict, failure=None):
        self.coalition = coalition
        self.rows = rows
        self.gaps = gaps
        self.strict = strict
        self.failure = failure

    @property
    def certified(self):
        return self.failure is None

    def to_lines(self, e):

        out = []
        for i in self.coalition:
            pref = e.preferences[i]
            out.append('agent {0}: bundle {1} gaps {2}'.format(i + 1, format_row(self.rows[i]),
                                                            format_row(self.gaps[i])))
            for t in self.strict[i]:
                out.append('  strict at prefix ({0}) gap {1}'.format(
                    ','.join(object_name(o) for o in pref[:t + 1]), format_rational(self.gaps[i][t])))
        if self.failure:
            out.append('failure: {0}'.format(self.failure))
        return out


def coalition_bundles(e, s, b):

    s = tuple(sorted(int(i) for i in s))
    if len(s) < 2 or len(set(s)) != len(s) or s[0] < 0 or s[-1] >= e.n:
        raise ValueError("Invalid coalition {0}".format([i + 1 for i in s]))
    if isinstance(b, dict):
        rows = dict((i, tuple(Fraction(x) for x in b[i])) for i in s)
    else:
        b = list(b)
        if len(b) != len(s):
            raise ValueError("Coalition has {0} members but {1} bundles were given".format(len(s), len(b)))
        rows = dict((i, tuple(Fraction(x) for x in row)) for i, row in zip(s, b))
    for i in s:
        if len(rows[i]) != e.n or any(x < 0 for x in rows[i]) or sum(rows[i], Fraction(0)) != 1:
            raise ValueError("Bundle for agent {0} is not an assignment".format(i + 1))
    for o in range(e.n):
        if sum((rows[i][o] for i in s), Fraction(0)) != sum((e.endowments[i, o] for i in s), Fraction(0)):
            raise ValueError("Bundles do not redistribute the coalition's endowment of {0}".format(object_name(o)))
    return s, rows


def certify_uniform_strong_block(e, c, s, b):

    """
    Certifies that coalition s strongly blocks every allocation of c via the fixed bundles b

    Succeeds iff for every member all prefix gaps are >= 0 and at least one is > 0.

    Args:
        e: Economy
        c: ConstraintSet
        s: Coalition
        b: Bundles, a dict agent -> row or a list aligned with sorted(s); must redistribute the coalition endowment

    Returns:
        UniformBlockCertificate
    """

    s, rows = coalition_bundles(e, s, b)
    gaps = {}
    strict = {}
    failure = None
    for i in s:
        ok, g = dominates_over_polytope(e, c, i, rows[i])
        gaps[i] = g
        strict[i] = tuple(t for t, v in enumerate(g) if v > 0)
        if failure is None:
            if not ok:
                t = min(t for t, v in enumerate(g) if v < 0)
                failure = 'agent {0} has negative gap {1} at prefix {2}'.format(i + 1, format_rational(g[t]), t + 1)
            elif not strict[i]:
                failure = 'agent {0} has no strictly positive gap'.format(i + 1)
    return UniformBlockCertificate(s, rows, gaps, strict, failure)


def ttc(e):

    """
    Top trading cycles for an integral housing market

    Each round every remaining agent points to the owner of their favourite remaining object; agents on a cycle
    receive the object they point at and leave.

    Args:
        e: Economy whose endowment matrix is a permutation matrix

    Returns:
        0/1 allocation
    """

    n = e.n
    owner = {}
    for i in range(n):
        row = e.endowments[i, :]
        ones = [o for o in range(n) if row[o] == 1]
        if len(ones) != 1 or any(row[o] not in (0, 1) for o in range(n)):
            raise ValueError("Top trading cycles needs an integral market; agent {0} owns {1}".format(
                i + 1, format_row(row)))
        owner[ones[0]] = i

    remaining = set(range(n))
    assigned = {}
    while remaining:
        available = set(o for o, i in owner.items() if i in remaining)
        target = {}
        for i in remaining:
            favourite = next(o for o in e.preferences[i] if o in available)
            target[i] = favourite
        done = set()
        for start in sorted(remaining):
            path = []
            i = start
            while i not in path and i not in done:
                path.append(i)
                i = owner[target[i]]
            if i in path:
                for j in path[path.index(i):]:
                    assigned[j] = target[j]
                    done.add(j)
        remaining -= done

    return object_matrix([[1 if assigned[i] == o else 0 for o in range(n)] for i in range(n)])


class CoreMembershipReport():

    """
    Verdict of a core membership check

    Args:
        allocation: The allocation checked
        notion: 'strong' or 'weak'
        member: Verdict
        ir_violator: Agent for whom IR fails, if that is the reason for rejection
        certificate: BlockCertificate, if a coalition blocks
        checked: Number of coalitions checked

    """

    def __init__(self, allocation, notion, member, ir_violator=None, certificate=None, checked=0):
        self.allocation = allocation
        self.notion = notion
        self.member = member
        self.ir_violator = ir_violator
        self.certificate = certificate
        self.checked = checked

    def to_lines(self):

        out = ['notion: {0} core'.format(self.notion),
               'verdict: {0}'.format('member' if self.member else 'non-member')]
        if self.ir_violator is not None:
            out.append('reason: IR fails for agent {0}'.format(self.ir_violator + 1))
        elif self.certificate is not None:
            out.append('reason: blocked')
            out.extend(self.certificate.to_text().split('\n'))
        out.append('coalitions checked: {0}'.format(self.checked))
        return out

    def __repr__(self):
        return 'CoreMembershipReport({0}, member={1})'.format(self.notion, self.member)


def _membership(e, p, notion, mode, max_size, verbose):

    p = as_allocation(p, e.n)
    ok, violator = is_IR(e, p)
    if not ok:
        return CoreMembershipReport(p, notion, False, ir_violator=violator)
    cert, checked = search_blocking_coalitions(e, p, mode, max_size, verbose=verbose)
    return CoreMembershipReport(p, notion, cert is None, certificate=cert, checked=checked)


def in_strong_core(e, p, max_size=None, verbose=False):

    """
    Strong core: IR and not weakly blocked by any coalition of size 2..max_size (default n)
    """

    return _membership(e, p, 'strong', WEAK, max_size, verbose)


def in_weak_core(e, p, max_size=None, verbose=False):

    """
    Weak core: IR and not strongly blocked by any coalition of size 2..max_size (default n)
    """

    return _membership(e, p, 'weak', STRONG, max_size, verbose)


def sample_allocations(c, seed=None, count=10, method='vertices', n_vertices=3, max_tries=1000):

    """
    Exact random points of a constraint set

    'vertices' maximises random integer objectives over c and takes random rational convex combinations of the
    optimal vertices. 'rejection' draws doubly stochastic matrices on the 1/64 grid and keeps those inside c,
    giving up after max_tries draws.

    Args:
        c: ConstraintSet
        seed: Seed or RandomState
        count: Number of samples
        method: 'vertices' or 'rejection'

    Returns:
        List of allocations (empty when c is infeasible)
    """

    rng = check_random_state(seed)
    n = c.n
    samples = []

    if method == 'rejection':
        for _ in range(max_tries):
            if len(samples) == count:
                break
            p = random_doubly_stochastic(n, rng)
            if c.contains(p):
                samples.append(p)
        return samples

    if method != 'vertices':
        raise ValueError("Method should be 'vertices' or 'rejection', got {0}".format(method))

    for _ in range(count):
        points = []
        for _ in range(n_vertices):
            objective = dict((j, int(rng.randint(-5, 6))) for j in range(n * n))
            out = ratlp.solve(c.to_lp(objective, 'max'))
            if not out.optimal:
                return []
            points.append(out.x)
        weights = [int(w) for w in rng.randint(1, 10, size=n_vertices)]
        total = sum(weights)
        flat = [sum((Fraction(w, total) * pt[j] for w, pt in zip(weights, points)), Fraction(0))
                for j in range(n * n)]
        samples.append(object_matrix([flat[i * n:(i + 1) * n] for i in range(n)]))
    return samples
