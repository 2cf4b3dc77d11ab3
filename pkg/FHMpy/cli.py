"""
Command-line front end.

    fhmpy validate --economy E1.txt
    fhmpy check --economy E1.txt --allocation p.alloc --properties ir,ete,eene,sdeff,envy
    fhmpy core --economy E1.txt --allocation p.alloc --notion weak
    fhmpy reproduce statement1
    fhmpy find-core --economy E1.txt --output p.alloc
    fhmpy properties ttc --count 200 --seed 0

Exit codes: 0 success or member, 1 parse/validation/script error, 2 I/O error, 3 non-member or failed reproduction
step, 4 solver failure. Reports contain no timings unless --timings is given, so identical invocations print
identical bytes.
"""

import argparse
import sys
import warnings
from collections import OrderedDict
from timeit import default_timer as timer

import numpy as np

from FHMpy import ratlp
from FHMpy.core import in_strong_core, in_weak_core
from FHMpy.dominance import find_envy, is_IR, is_sd_efficient, satisfies_EENE, satisfies_ETE
from FHMpy.economy import InvalidEconomyError, bundled_economy, load_bundled, parse_allocation, parse_economy, \
    serialize_allocation
from FHMpy.equilibrium import DEFAULT_MAXDEN, DEFAULT_SCHEDULE_LENGTH, DEFAULT_TOL, EpsilonSchedule, \
    find_weak_core_ETE, parse_utilities
from FHMpy.properties import SUITES, counterexamples, run_suite
from FHMpy.scenario import ScriptError, certify_statement1, certify_statement3
from FHMpy.utils import ParseError, digest, format_matrix


EXIT_OK, EXIT_INVALID, EXIT_IO, EXIT_REJECTED, EXIT_SOLVER = 0, 1, 2, 3, 4

PROPERTIES = ('ir', 'ete', 'eene', 'sdeff', 'envy')

REPRODUCTIONS = OrderedDict([
    ('statement1', (certify_statement1, 'e1', 'statement1.script')),
    ('statement3', (certify_statement3, 'e1_prime', 'statement3.script')),
])


class RunReport():

    """
    Everything a command prints: inputs with digests, verdicts, free-form sections and optional timings

    Args:
        command: Command name
        seed: Seed of the run, if the command uses one

    """

    def __init__(self, command, seed=None):
        self.command = command
        self.seed = seed
        self.inputs = OrderedDict()
        self.verdicts = OrderedDict()
        self.sections = OrderedDict()
        self.timings = OrderedDict()

    def add_input(self, name, path, text):
        self.inputs[name] = (path, digest(text))

    def add_verdict(self, key, value):
        self.verdicts[key] = value

    def add_section(self, title, lines):
        self.sections[title] = list(lines)

    def render(self, fmt='text', timings=False):

        """
        Text is meant for reading; 'structured' prints one key=value pair per line, with section lines numbered
        """

        if fmt not in ('text', 'structured'):
            raise ValueError("Format should be 'text' or 'structured', got {0}".format(fmt))

        out = []
        if fmt == 'text':
            out.append('command: {0}'.format(self.command))
            if self.seed is not None:
                out.append('seed: {0}'.format(self.seed))
            for name, (path, d) in self.inputs.items():
                out.append('input {0}: {1} (sha256 {2})'.format(name, path, d))
            for title, lines in self.sections.items():
                out.append('')
                out.append('== {0} =='.format(title))
                out.extend(lines)
            out.append('')
            for key, value in self.verdicts.items():
                out.append('{0}: {1}'.format(key, value))
            if timings:
                for key, value in self.timings.items():
                    out.append('time {0}: {1:.3f} s'.format(key, value))
        else:
            out.append('command={0}'.format(self.command))
            if self.seed is not None:
                out.append('seed={0}'.format(self.seed))
            for name, (path, d) in self.inputs.items():
                out.append('input.{0}.path={1}'.format(name, path))
                out.append('input.{0}.sha256={1}'.format(name, d))
            for title, lines in self.sections.items():
                key = title.replace(' ', '_')
                for k, line in enumerate(lines, 1):
                    out.append('section.{0}.{1}={2}'.format(key, k, line))
            for key, value in self.verdicts.items():
                out.append('verdict.{0}={1}'.format(key.replace(' ', '_'), value))
            if timings:
                for key, value in self.timings.items():
                    out.append('time.{0}={1:.3f}'.format(key, value))
        return '\n'.join(out) + '\n'


def _read(path):
    with open(path) as f:
        return f.read()


def _load_economy(report, path):

    text = _read(path)
    report.add_input('economy', path, text)
    return parse_economy(text)


def _load_allocation(report, path, n):

    text = _read(path)
    report.add_input('allocation', path, text)
    return parse_allocation(text, n)


def _pair(where):
    return ', '.join(str(i + 1) for i in where)


def cmd_validate(economy_path, allocation_path=None):

    """
    Validates an economy file (and optionally an allocation file against it)

    Returns:
        (exit code, RunReport)
    """

    report = RunReport('validate')
    try:
        e = _load_economy(report, economy_path)
    except InvalidEconomyError as err:
        report.add_section('violations', err.report.lines())
        report.add_verdict('valid', 'no')
        return EXIT_INVALID, report
    report.add_section('economy', ['n = {0}'.format(e.n)])
    if allocation_path is not None:
        text = _read(allocation_path)
        report.add_input('allocation', allocation_path, text)
        try:
            parse_allocation(text, e.n)
        except InvalidEconomyError as err:
            report.add_section('violations', err.report.lines())
            report.add_verdict('valid', 'no')
            return EXIT_INVALID, report
    report.add_verdict('valid', 'yes')
    return EXIT_OK, report


def cmd_check(economy_path, allocation_path, properties=PROPERTIES):

    """
    One verdict per requested property, with the first witness of each failure

    Returns:
        (exit code, RunReport)
    """

    unknown = [p for p in properties if p not in PROPERTIES]
    if unknown:
        raise ValueError("Unknown properties {0}, expected a subset of {1}".format(unknown, list(PROPERTIES)))

    report = RunReport('check')
    e = _load_economy(report, economy_path)
    p = _load_allocation(report, allocation_path, e.n)

    for prop in properties:
        if prop == 'ir':
            ok, agent = is_IR(e, p)
            report.add_verdict('ir', 'yes' if ok else 'no (agent {0})'.format(agent + 1))
        elif prop == 'ete':
            ok, pair = satisfies_ETE(e, p)
            report.add_verdict('ete', 'yes' if ok else 'no (agents {0})'.format(_pair(pair)))
        elif prop == 'eene':
            ok, pair = satisfies_EENE(e, p)
            report.add_verdict('eene', 'yes' if ok else 'no (agent {0} envies agent {1})'.format(
                pair[0] + 1, pair[1] + 1))
        elif prop == 'sdeff':
            ok, q = is_sd_efficient(e, p)
            report.add_verdict('sdeff', 'yes' if ok else 'no')
            if not ok:
                report.add_section('sd-dominating allocation', format_matrix(q).splitlines())
        elif prop == 'envy':
            ok, pair = find_envy(e, p)
            report.add_verdict('envy', 'none' if ok else 'agent {0} envies agent {1}'.format(pair[0] + 1,
                                                                                            pair[1] + 1))
    return EXIT_OK, report


def cmd_core(economy_path, allocation_path, notion='weak', max_size=None):

    """
    Core membership with the blocking certificate on rejection

    Returns:
        (0 if member else 3, RunReport)
    """

    if notion not in ('strong', 'weak'):
        raise ValueError("Notion should be 'strong' or 'weak', got {0}".format(notion))
    report = RunReport('core')
    e = _load_economy(report, economy_path)
    p = _load_allocation(report, allocation_path, e.n)
    start = timer()
    membership = (in_strong_core if notion == 'strong' else in_weak_core)(e, p, max_size=max_size)
    report.timings['core'] = timer() - start
    report.add_section('membership', membership.to_lines())
    report.add_verdict('{0} core'.format(notion), 'member' if membership.member else 'non-member')
    return (EXIT_OK if membership.member else EXIT_REJECTED), report


def cmd_reproduce(item, economy_path=None, script_path=None):

    """
    Runs one of the bundled certifications (statement1: empty strong core; statement3: weak core and EENE
    incompatible), by default on the bundled economy it is stated for

    Returns:
        (0 if certified else 3, RunReport)
    """

    if item not in REPRODUCTIONS:
        raise ValueError("Unknown item '{0}', expected one of {1}".format(item, list(REPRODUCTIONS)))
    certify, economy_name, script_name = REPRODUCTIONS[item]

    report = RunReport('reproduce {0}'.format(item))
    if economy_path is None:
        report.add_input('economy', 'bundled:{0}.txt'.format(economy_name),
                         load_bundled('{0}.txt'.format(economy_name)))
        e = bundled_economy('{0}.txt'.format(economy_name))
    else:
        e = _load_economy(report, economy_path)
    if script_path is None:
        script = load_bundled(script_name)
        report.add_input('script', 'bundled:{0}'.format(script_name), script)
    else:
        script = _read(script_path)
        report.add_input('script', script_path, script)

    start = timer()
    result = certify(e, script=script)
    report.timings['reproduce'] = timer() - start
    report.add_section('steps', result.to_lines()[:-1])
    report.add_verdict('result', result.verdict)
    return (EXIT_OK if result.certified else EXIT_REJECTED), report


def cmd_find_core(economy_path, schedule=DEFAULT_SCHEDULE_LENGTH, maxden=DEFAULT_MAXDEN, seed=0, tol=DEFAULT_TOL,
                  utilities_path=None, output_path=None):

    """
    Computes and exactly verifies a weak-core ETE allocation, writing it to output_path on success

    Returns:
        (0 if verified else 4, RunReport)
    """

    report = RunReport('find-core', seed=seed)
    e = _load_economy(report, economy_path)
    u = None
    if utilities_path is not None:
        text = _read(utilities_path)
        report.add_input('utilities', utilities_path, text)
        u = parse_utilities(text, e)

    start = timer()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter('always')
        result = find_weak_core_ETE(e, EpsilonSchedule.geometric(schedule), maxden=maxden, u=u, tol=tol,
                                    seed=seed)
    report.timings['find-core'] = timer() - start

    report.add_section('search', result.to_lines())
    if caught:
        report.add_section('warnings', sorted(set(str(w.message) for w in caught)))

    if not result.verified:
        if result.iterates:
            last = result.iterates[-1]
            report.add_section('best residual', last.to_lines())
        report.add_verdict('weak core ETE', 'not found')
        return EXIT_SOLVER, report

    report.add_section('allocation', format_matrix(result.allocation).splitlines())
    if output_path is not None:
        with open(output_path, 'w') as f:
            f.write(serialize_allocation(result.allocation))
        report.add_verdict('written', output_path)
    report.add_verdict('eene', 'yes' if result.verification.eene[0] else 'no')
    report.add_verdict('weak core ETE', 'verified')
    return EXIT_OK, report


def cmd_properties(suite, count=None, seed=0):

    """
    Runs a seeded property suite

    Returns:
        (0 if the suite found no counterexample else 3, RunReport)
    """

    report = RunReport('properties {0}'.format(suite), seed=seed)
    start = timer()
    table = run_suite(suite, count, seed)
    report.timings['properties'] = timer() - start
    bad = counterexamples(table)
    report.add_section('instances', table.to_string(index=False).splitlines())
    if len(bad):
        report.add_section('counterexamples', bad.to_string(index=False).splitlines())
    if 'verified' in table:
        report.add_verdict('verified', '{0}/{1}'.format(int(np.sum(table['verified'].astype(bool))), len(table)))
    report.add_verdict('instances', len(table))
    report.add_verdict('counterexamples', len(bad))
    return (EXIT_OK if not len(bad) else EXIT_REJECTED), report


def build_parser():

    parser = argparse.ArgumentParser(prog='fhmpy', description='Core analysis of housing markets with fractional '
                                                               'endowments, in exact arithmetic.')
    parser.add_argument('--format', choices=('text', 'structured'), default='text', help='report format')
    parser.add_argument('--timings', action='store_true', help='include timings in the report')
    parser.add_argument('--verify-certificates', action='store_true',
                        help='re-check every LP certificate as it is produced')
    sub = parser.add_subparsers(dest='command')

    p = sub.add_parser('validate', help='validate an economy (and allocation) file')
    p.add_argument('--economy', required=True)
    p.add_argument('--allocation')

    p = sub.add_parser('check', help='fairness and efficiency properties of an allocation')
    p.add_argument('--economy', required=True)
    p.add_argument('--allocation', required=True)
    p.add_argument('--properties', default=','.join(PROPERTIES),
                   help='comma-separated subset of {0}'.format(','.join(PROPERTIES)))

    p = sub.add_parser('core', help='strong or weak core membership')
    p.add_argument('--economy', required=True)
    p.add_argument('--allocation', required=True)
    p.add_argument('--notion', choices=('strong', 'weak'), default='weak')
    p.add_argument('--max-size', type=int, default=None)

    p = sub.add_parser('reproduce', help='run a bundled certification')
    p.add_argument('item', choices=list(REPRODUCTIONS))
    p.add_argument('--economy')
    p.add_argument('--script')

    p = sub.add_parser('find-core', help='compute a weak-core allocation satisfying ETE')
    p.add_argument('--economy', required=True)
    p.add_argument('--schedule', type=int, default=DEFAULT_SCHEDULE_LENGTH, help='number of eps values 2^-k')
    p.add_argument('--maxden', type=int, default=DEFAULT_MAXDEN)
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('--tol', type=float, default=DEFAULT_TOL)
    p.add_argument('--utilities')
    p.add_argument('--output')

    p = sub.add_parser('properties', help='run a seeded property suite')
    p.add_argument('suite', choices=list(SUITES))
    p.add_argument('--count', type=int, default=None)
    p.add_argument('--seed', type=int, default=0)

    return parser


def _dispatch(args):

    if args.command == 'validate':
        return cmd_validate(args.economy, args.allocation)
    if args.command == 'check':
        return cmd_check(args.economy, args.allocation,
                         tuple(p.strip() for p in args.properties.split(',') if p.strip()))
    if args.command == 'core':
        return cmd_core(args.economy, args.allocation, args.notion, args.max_size)
    if args.command == 'reproduce':
        return cmd_reproduce(args.item, args.economy, args.script)
    if args.command == 'find-core':
        return cmd_find_core(args.economy, args.schedule, args.maxden, args.seed, args.tol, args.utilities,
                             args.output)
    return cmd_properties(args.suite, args.count, args.seed)


def main(argv=None):

    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help()
        return EXIT_INVALID
    if args.verify_certificates:
        ratlp.VERIFY_CERTIFICATES = True

    try:
        code, report = _dispatch(args)
    except (IOError, OSError) as err:
        sys.stderr.write('error: {0}\n'.format(err))
        return EXIT_IO
    except ratlp.CertificateError as err:
        sys.stderr.write('error: {0}\n'.format(err))
        return EXIT_SOLVER
    except (ParseError, InvalidEconomyError, ScriptError, ValueError) as err:
        sys.stderr.write('error: {0}\n'.format(err))
        return EXIT_INVALID

    sys.stdout.write(report.render(args.format, args.timings))
    return code


if __name__ == '__main__':
    sys.exit(main())
