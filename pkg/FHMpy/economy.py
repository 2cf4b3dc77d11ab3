"""
Economies and allocations of a housing market with fractional endowments.

Agents and objects are 0-based in the Python API; text files and reports are 1-based ("agent 1", "o_1").
"""

import os
import re
from collections import namedtuple, OrderedDict
from fractions import Fraction

import numpy as np

from FHMpy.utils import ParseError, parse_rational, format_rational, format_row, object_matrix


DATA_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'data')

_OBJECT = re.compile(r'^o_?(\d+)$')


Violation = namedtuple('Violation', ['kind', 'message', 'agent', 'obj'])


class ValidationReport():

    """
    Violations found when validating an economy or allocation. Empty (falsy) when everything holds.
    """

    def __init__(self, violations=None):
        self.violations = list(violations or [])

    def add(self, kind, message, agent=None, obj=None):
        self.violations.append(Violation(kind, message, agent, obj))

    def __len__(self):
        return len(self.violations)

    def __bool__(self):
        return len(self.violations) > 0

    __nonzero__ = __bool__

    def __iter__(self):
        return iter(self.violations)

    def kinds(self):
        return [v.kind for v in self.violations]

    def lines(self):
        return [v.message for v in self.violations]

    def __repr__(self):
        return 'ValidationReport({0})'.format(self.lines())


class InvalidEconomyError(ValueError):

    def __init__(self, report, what='economy'):
        self.report = report
        super(InvalidEconomyError, self).__init__("Invalid {0}:\n{1}".format(what, '\n'.join(report.lines())))


class Economy():

    """
    A housing market with fractional endowments

    Args:
        preferences: One strict order per agent, given as a sequence of object indices (0-based), best first
        endowments: n x n doubly stochastic matrix of exact rationals; row i is agent i's endowment
        validate: Check the economy invariants and raise InvalidEconomyError if any fails

    """

    def __init__(self, preferences, endowments, validate=True):

        self.preferences = tuple(tuple(int(o) for o in pref) for pref in preferences)
        self.endowments = object_matrix(endowments)
        self.n = len(self.preferences)
        self._ranks = None

        if validate:
            report = validate_economy(self)
            if report:
                raise InvalidEconomyError(report)

    @property
    def omega(self):
        return self.endowments

    @property
    def agents(self):
        return range(self.n)

    def ranks(self, i):

        """
        Position of every object in agent i's order (0 = favourite)
        """

        if self._ranks is None:
            self._ranks = []
            for pref in self.preferences:
                r = [0] * self.n
                for position, o in enumerate(pref):
                    r[o] = position
                self._ranks.append(tuple(r))
        return self._ranks[i]

    def with_preferences(self, preferences):

        """
        Same endowments under another preference profile
        """

        return Economy(preferences, self.endowments)

    def to_text(self):
        return serialize_economy(self)

    def __eq__(self, other):
        return isinstance(other, Economy) and self.preferences == other.preferences and \
            self.endowments.shape == other.endowments.shape and bool((self.endowments == other.endowments).all())

    def __ne__(self, other):
        return not self.__eq__(other)

    def __hash__(self):
        return hash((self.preferences, tuple(self.endowments.ravel())))

    def __repr__(self):
        return 'Economy(n={0})'.format(self.n)


def object_name(o):
    return 'o_{0}'.format(o + 1)


def _check_matrix(m, n, report, what):

    if m.shape != (n, n):
        report.add('shape', '{0} has shape {1}, expected ({2}, {2})'.format(what, m.shape, n))
        return False

    for i in range(n):
        for o in range(n):
            if m[i, o] < 0 or m[i, o] > 1:
                report.add('entry', '{0} entry (agent {1}, {2}) = {3} outside [0, 1]'.format(
                    what, i + 1, object_name(o), format_rational(m[i, o])), agent=i, obj=o)
    for i in range(n):
        s = sum(m[i, :], Fraction(0))
        if s != 1:
            report.add('row', '{0} row {1} sum {2} != 1'.format(what, i + 1, format_rational(s)), agent=i)
    for o in range(n):
        s = sum(m[:, o], Fraction(0))
        if s != 1:
            report.add('column', '{0} column {1} sum {2} != 1'.format(what, object_name(o), format_rational(s)), obj=o)
    return True


def validate_economy(e):

    """
    Checks the economy invariants

    Args:
        e: An Economy, usually built with validate=False

    Returns:
        A ValidationReport; empty iff the preferences are permutations and the endowments are doubly stochastic
    """

    report = ValidationReport()
    n = e.n

    if n < 1:
        report.add('size', 'economy has no agents')
        return report

    for i, pref in enumerate(e.preferences):
        if len(pref) != n:
            report.add('preference', 'agent {0} ranks {1} objects, expected {2}'.format(i + 1, len(pref), n), agent=i)
        seen = set()
        for o in pref:
            if o < 0 or o >= n:
                report.add('preference', 'agent {0} ranks unknown object {1}'.format(i + 1, object_name(o)), agent=i)
            elif o in seen:
                report.add('preference', 'agent {0} lists {1} twice'.format(i + 1, object_name(o)), agent=i, obj=o)
            seen.add(o)

    _check_matrix(e.endowments, n, report, 'endowment')

    return report


validate = validate_economy


def validate_allocation(p, n=None):

    """
    Checks that p is doubly stochastic (and n x n when n is given)
    """

    p = object_matrix(p)
    report = ValidationReport()
    if n is None:
        n = p.shape[0]
    _check_matrix(p, n, report, 'allocation')
    return report


def as_allocation(p, n):

    """
    Converts p to an exact n x n matrix, raising ValueError on a dimension mismatch
    """

    p = object_matrix(p)
    if p.shape != (n, n):
        raise ValueError("Allocation has shape {0} but the economy has {1} agents".format(p.shape, n))
    return p


def endowment_allocation(e):

    """
    The no-trade allocation p = ω
    """

    return e.endowments


def equal_class_partition(e):

    """
    Coarsest partition of agents into groups with identical preferences and identical endowments

    Args:
        e: Economy

    Returns:
        Tuple of groups (tuples of agent indices), ordered by smallest member
    """

    groups = OrderedDict()
    for i in range(e.n):
        key = (e.preferences[i], tuple(e.endowments[i, :]))
        groups.setdefault(key, []).append(i)
    return tuple(tuple(g) for g in groups.values())


def equal_endowment_groups(e):

    """
    Groups of agents holding identical endowment rows (the pairs EENE compares)
    """

    groups = OrderedDict()
    for i in range(e.n):
        groups.setdefault(tuple(e.endowments[i, :]), []).append(i)
    return tuple(tuple(g) for g in groups.values())


def _content_lines(text):

    # (line number, stripped content, original line) for non-blank, non-comment lines
    out = []
    for number, line in enumerate(text.splitlines(), 1):
        content = line.split('#', 1)[0]
        if content.strip():
            out.append((number, content, line))
    return out


def _tokens(content):

    return [(m.group(0), m.start() + 1) for m in re.finditer(r'\S+', content)]


def _parse_rows(lines, n, what):

    rows = []
    for number, content, _ in lines:
        tokens = _tokens(content)
        if len(tokens) != n:
            raise ParseError("{0} row has {1} entries, expected {2}".format(what, len(tokens), n), number)
        rows.append([parse_rational(tok, number, col) for tok, col in tokens])
    return rows


def parse_economy(text):

    """
    Parses an economy file

    The format is: a line with n; n preference lines listing object names best first; n endowment rows of
    rationals ("a/b" or integers). Text after '#' is a comment.

    Args:
        text: File contents

    Returns:
        A validated Economy

    """

    lines = _content_lines(text)
    if not lines:
        raise ParseError("empty economy file", 1)

    number, content, _ = lines[0]
    tokens = _tokens(content)
    if len(tokens) != 1 or not tokens[0][0].isdigit():
        raise ParseError("first line must hold the number of agents", number, tokens[0][1] if tokens else 1)
    n = int(tokens[0][0])
    if n < 1:
        raise ParseError("number of agents must be positive", number, tokens[0][1])

    if len(lines) < 2 * n + 1:
        last = lines[-1][0]
        raise ParseError("expected {0} preference lines and {0} endowment rows, found {1} lines".format(
            n, len(lines) - 1), last)
    if len(lines) > 2 * n + 1:
        raise ParseError("unexpected content after the endowment matrix", lines[2 * n + 1][0])

    preferences = []
    for number, content, _ in lines[1:n + 1]:
        tokens = _tokens(content)
        if len(tokens) != n:
            raise ParseError("preference line lists {0} objects, expected {1}".format(len(tokens), n), number)
        pref = []
        for tok, col in tokens:
            m = _OBJECT.match(tok)
            if m is None:
                raise ParseError("'{0}' is not an object name".format(tok), number, col)
            k = int(m.group(1))
            if k < 1 or k > n:
                raise ParseError("object {0} out of range 1..{1}".format(tok, n), number, col)
            pref.append(k - 1)
        preferences.append(pref)

    rows = _parse_rows(lines[n + 1:], n, 'endowment')

    return Economy(preferences, rows, validate=True)


def serialize_economy(e):

    """
    Canonical text form of an economy; parse_economy(serialize_economy(e)) == e
    """

    out = [str(e.n)]
    for pref in e.preferences:
        out.append(' '.join(object_name(o) for o in pref))
    for i in range(e.n):
        out.append(format_row(e.endowments[i, :]))
    return '\n'.join(out) + '\n'


def parse_allocation(text, n=None):

    """
    Parses an allocation file: n lines of n rational entries

    Args:
        text: File contents
        n: Expected size, taken from the first row when None

    Returns:
        Read-only object matrix; raises InvalidEconomyError when it is not doubly stochastic
    """

    lines = _content_lines(text)
    if not lines:
        raise ParseError("empty allocation file", 1)
    if n is None:
        n = len(_tokens(lines[0][1]))
    if len(lines) != n:
        raise ParseError("allocation has {0} rows, expected {1}".format(len(lines), n), lines[-1][0])
    p = object_matrix(_parse_rows(lines, n, 'allocation'))
    report = validate_allocation(p, n)
    if report:
        raise InvalidEconomyError(report, what='allocation')
    return p


def serialize_allocation(p):

    return '\n'.join(format_row(row) for row in np.asarray(p)) + '\n'


def load_bundled(name):

    """
    Contents of a bundled data file (see FHMpy/data)
    """

    with open(os.path.join(DATA_DIR, name)) as f:
        return f.read()


def bundled_economy(name):
    return parse_economy(load_bundled(name))
