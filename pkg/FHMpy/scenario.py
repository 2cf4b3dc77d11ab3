"""
Certification scripts: a small line-oriented language whose directives each reduce to exact LP checks.

    constraints IR+EENE
    forced eq p1,o1+p1,o2 1/2
    best-exchange 1,3 0 1/2 0 1/2 | 1/2 0 1/2 0
    conclude-equalities p1 = 0 1/2 0 1/2 | p3 = 1/2 0 1/2 0
    expect infeasible
    uniform-block 1,3 0 1/2 0 1/2 | 1/2 0 1/2 0 over IR+EENE

Agents and objects are 1-based in scripts. Directives run in order and every step's conclusions feed the next;
the first failing step ends the run.
"""

import re
from collections import namedtuple
from fractions import Fraction
from timeit import default_timer as timer

from FHMpy import ratlp
from FHMpy.core import (build_constraints, parse_tags, forced_bounds, dominates_over_polytope,
                        certify_uniform_strong_block, format_functional, coalition_bundles, IR, EENE)
from FHMpy.economy import load_bundled, object_name
from FHMpy.utils import parse_rational, format_rational, format_row


Directive = namedtuple('Directive', ['kind', 'line', 'args'])

KINDS = ('constraints', 'forced', 'best-exchange', 'conclude-equalities', 'expect', 'uniform-block')

_TERM = re.compile(r'^(?:([0-9/.]+)\*)?p(\d+),o_?(\d+)$')


class ScriptError(ValueError):

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = "script line {0}: {1}".format(line, message)
        super(ScriptError, self).__init__(message)


def parse_functional(text, line=None):

    """
    Parses 'p1,o1+p1,o2' or '2*p1,o4-p2,o4' into {(agent, object): coefficient} (0-based keys)
    """

    text = text.replace(' ', '')
    if not text:
        raise ScriptError("empty functional", line)
    # split on + and - that start a new term
    pieces = re.findall(r'[+-]?[^+-]+', text)
    f = {}
    for piece in pieces:
        negative = piece.startswith('-')
        piece = piece.lstrip('+-')
        m = _TERM.match(piece)
        if m is None:
            raise ScriptError("'{0}' is not a term like p1,o2 or 1/2*p1,o2".format(piece), line)
        q = parse_rational(m.group(1), line) if m.group(1) else Fraction(1)
        if negative:
            q = -q
        key = (int(m.group(2)) - 1, int(m.group(3)) - 1)
        f[key] = f.get(key, 0) + q
    return f


def _parse_coalition(token, line):

    try:
        s = tuple(int(x) - 1 for x in token.split(','))
    except ValueError:
        raise ScriptError("'{0}' is not a coalition like 1,3".format(token), line)
    if len(s) < 2 or min(s) < 0:
        raise ScriptError("coalition '{0}' needs at least two agents numbered from 1".format(token), line)
    return s


def _parse_rows(text, line):

    rows = []
    for chunk in text.split('|'):
        tokens = chunk.split()
        if not tokens:
            raise ScriptError("empty bundle row", line)
        rows.append(tuple(parse_rational(tok, line) for tok in tokens))
    return rows


def parse_script(text):

    """
    Parses a certification script

    Args:
        text: Script contents

    Returns:
        List of Directive(kind, line, args)
    """

    directives = []
    for number, raw in enumerate(text.splitlines(), 1):
        content = raw.split('#', 1)[0].strip()
        if not content:
            continue
        keyword, _, rest = content.partition(' ')
        rest = rest.strip()

        try:
            if keyword == 'constraints':
                directives.append(Directive('constraints', number, (parse_tags(rest),)))

            elif keyword == 'forced':
                tokens = rest.split()
                if len(tokens) < 3 or tokens[0] not in ('eq', 'le', 'ge'):
                    raise ScriptError("expected 'forced eq|le|ge <functional> <rational>'", number)
                f = parse_functional(''.join(tokens[1:-1]), number)
                directives.append(Directive('forced', number, (tokens[0], f, parse_rational(tokens[-1], number))))

            elif keyword == 'best-exchange':
                coalition, _, rows = rest.partition(' ')
                s = _parse_coalition(coalition, number)
                directives.append(Directive('best-exchange', number, (s, _parse_rows(rows, number))))

            elif keyword == 'conclude-equalities':
                equalities = []
                for chunk in rest.split('|'):
                    name, eq, row = chunk.partition('=')
                    m = re.match(r'^\s*p(\d+)\s*$', name)
                    if not eq or m is None:
                        raise ScriptError("expected 'p<i> = <row>', got '{0}'".format(chunk.strip()), number)
                    equalities.append((int(m.group(1)) - 1, _parse_rows(row, number)[0]))
                directives.append(Directive('conclude-equalities', number, (equalities,)))

            elif keyword == 'expect':
                if rest != 'infeasible':
                    raise ScriptError("only 'expect infeasible' is supported", number)
                directives.append(Directive('expect', number, ('infeasible',)))

            elif keyword == 'uniform-block':
                body, over, tags = rest.rpartition(' over ')
                if not over:
                    raise ScriptError("expected 'uniform-block <coalition> <rows> over <tags>'", number)
                coalition, _, rows = body.strip().partition(' ')
                s = _parse_coalition(coalition, number)
                directives.append(Directive('uniform-block', number,
                                            (s, _parse_rows(rows, number), parse_tags(tags))))

            else:
                raise ScriptError("unknown directive '{0}', expected one of {1}".format(
                    keyword, ', '.join(KINDS)), number)

        except ScriptError:
            raise
        except ValueError as err:
            raise ScriptError(str(err), number)

    return directives


class Step():

    """
    One executed directive: what ran, whether it passed, and the exact values it produced
    """

    def __init__(self, directive, passed, lines, values=None):
        self.directive = directive
        self.passed = passed
        self.lines = lines
        self.values = values or {}

    @property
    def kind(self):
        return self.directive.kind

    @property
    def name(self):
        return '{0} (line {1})'.format(self.directive.kind, self.directive.line)


class ScenarioReport():

    """
    Steps of a scenario run and the overall verdict

    Args:
        title: Verdict text printed when every step passes
        steps: Executed steps, up to and including the first failure
        required: Directive kinds that must appear for the run to count as a certificate

    """

    def __init__(self, title, steps, required=(), elapsed=None):
        self.title = title
        self.steps = steps
        self.required = tuple(required)
        self.elapsed = elapsed

    @property
    def failed_step(self):
        for step in self.steps:
            if not step.passed:
                return step
        return None

    @property
    def missing(self):
        present = set(step.kind for step in self.steps)
        return [k for k in self.required if k not in present]

    @property
    def certified(self):
        return bool(self.steps) and self.failed_step is None and not self.missing

    @property
    def verdict(self):
        if self.certified:
            return '{0}: certified'.format(self.title)
        if self.failed_step is not None:
            return '{0}: FAILED at {1}'.format(self.title, self.failed_step.name)
        return '{0}: FAILED, script lacks {1}'.format(self.title, ', '.join(self.missing) or 'directives')

    def to_lines(self):

        out = []
        for step in self.steps:
            out.append('[{0}] {1}'.format('ok' if step.passed else 'FAIL', step.name))
            out.extend('  ' + line for line in step.lines)
        out.append(self.verdict)
        return out


def _forced(e, c, directive):

    mode, f, value = directive.args
    fb = forced_bounds(c, f)
    name = format_functional(f)
    if fb.infeasible:
        return Step(directive, False, ['constraint set is infeasible'])
    line = '{0} in [{1}, {2}]'.format(name, format_rational(fb.min), format_rational(fb.max))
    if mode == 'eq':
        passed = fb.min == value and fb.max == value
    elif mode == 'le':
        passed = fb.max <= value
    else:
        passed = fb.min >= value
    return Step(directive, passed, [line], {'min': fb.min, 'max': fb.max})


def _best_exchange(e, c, directive, bundles):

    s, rows = directive.args
    s, rows = coalition_bundles(e, s, rows)
    lines = []
    passed = True
    gaps = {}
    for i in s:
        ok, g = dominates_over_polytope(e, c, i, rows[i])
        gaps[i] = g
        lines.append('agent {0}: bundle {1} prefix gaps {2}'.format(i + 1, format_row(rows[i]), format_row(g)))
        passed = passed and ok
    if passed:
        for i in s:
            bundles.setdefault(i, set()).add(rows[i])
    return Step(directive, passed, lines, {'gaps': gaps})


def _conclude(e, c, directive, bundles):

    equalities, = directive.args
    lines = []
    for i, row in equalities:
        if i < 0 or i >= e.n or len(row) != e.n:
            return Step(directive, False, ['p{0} = {1} does not fit the economy'.format(i + 1, format_row(row))])
        row = tuple(Fraction(x) for x in row)
        if row in bundles.get(i, ()):
            lines.append('p{0} = {1}: equals a certified best exchange'.format(i + 1, format_row(row)))
            continue
        for o, v in enumerate(row):
            fb = forced_bounds(c, {(i, o): 1})
            if not fb.forced or fb.min != v:
                lines.append('p{0} = {1}: not justified, p{0},{2} is not forced to {3}'.format(
                    i + 1, format_row(row), object_name(o), format_rational(v)))
                return Step(directive, False, lines)
        lines.append('p{0} = {1}: every entry forced'.format(i + 1, format_row(row)))
    for i, row in equalities:
        c.add_assignment(i, row)
    return Step(directive, True, lines)


def _expect_infeasible(e, c, directive):

    lp = c.to_lp({}, 'max')
    out = ratlp.solve(lp)
    if not out.infeasible:
        return Step(directive, False, ['constraint set is feasible, e.g. {0}'.format(format_row(out.x))])
    if not ratlp.check_certificate(lp, out):
        return Step(directive, False, ['Farkas certificate failed verification'])
    used = sum(1 for v in out.farkas if v)
    return Step(directive, True, ['infeasible: Farkas certificate verified ({0} rows combined)'.format(used)],
                {'farkas': out.farkas})


def _uniform_block(e, directive):

    s, rows, tags = directive.args
    c = build_constraints(e, tags)
    cert = certify_uniform_strong_block(e, c, s, rows)
    return Step(directive, cert.certified, cert.to_lines(e), {'certificate': cert})


def run_scenario(e, directives, title='SCENARIO', required=(), verbose=False):

    """
    Executes a parsed script against an economy

    Args:
        e: Economy
        directives: Output of parse_script
        title: Verdict prefix
        required: Directive kinds that must be present for a certificate
        verbose: Print each step as it completes

    Returns:
        ScenarioReport
    """

    start = timer()
    c = build_constraints(e, ())
    bundles = {}
    steps = []

    for directive in directives:
        try:
            if directive.kind == 'constraints':
                tags, = directive.args
                c = build_constraints(e, tags)
                step = Step(directive, True, ['constraints: {0} ({1} rows)'.format('+'.join(tags) or 'none', len(c))])
            elif directive.kind == 'forced':
                step = _forced(e, c, directive)
            elif directive.kind == 'best-exchange':
                step = _best_exchange(e, c, directive, bundles)
            elif directive.kind == 'conclude-equalities':
                step = _conclude(e, c, directive, bundles)
            elif directive.kind == 'expect':
                step = _expect_infeasible(e, c, directive)
            elif directive.kind == 'uniform-block':
                step = _uniform_block(e, directive)
            else:
                raise ScriptError("unknown directive '{0}'".format(directive.kind), directive.line)
        except ScriptError:
            raise
        except ValueError as err:
            step = Step(directive, False, [str(err)])

        steps.append(step)
        if verbose:
            print('[{0}] {1}'.format('ok' if step.passed else 'FAIL', step.name))
        if not step.passed:
            break

    end = timer()
    if verbose:
        print("Finished scenario in {0} seconds".format(end - start))

    return ScenarioReport(title, steps, required, elapsed=end - start)


STATEMENT1_TITLE = 'STRONG CORE EMPTY'
STATEMENT3_TITLE = 'WEAK CORE ∩ EENE = ∅'


def certify_statement1(e, script=None, verbose=False):

    """
    Certifies that the strong core of e is empty by the forced-bounds, best-exchange, equality and infeasibility
    chain of a script (the bundled statement1.script by default)

    Returns:
        ScenarioReport; certified only if every step passes and the script contains all four kinds of step
    """

    if script is None:
        script = load_bundled('statement1.script')
    return run_scenario(e, parse_script(script), STATEMENT1_TITLE,
                        required=('forced', 'best-exchange', 'conclude-equalities', 'expect'), verbose=verbose)


def certify_statement3(e, script=None, verbose=False):

    """
    Certifies that no IR allocation satisfying EENE is in the weak core of e: every such allocation is strongly
    blocked via the script's uniform-block bundles (the bundled statement3.script by default)
    """

    if script is None:
        script = load_bundled('statement3.script')
    directives = parse_script(script)
    report = run_scenario(e, directives, STATEMENT3_TITLE, required=('uniform-block',), verbose=verbose)
    for d in directives:
        if d.kind == 'uniform-block' and not {IR, EENE} <= set(d.args[2]):
            report.steps.append(Step(d, False, ['uniform block must range over IR+EENE allocations']))
    return report
