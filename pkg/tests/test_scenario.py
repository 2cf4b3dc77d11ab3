from fractions import Fraction

import pytest

from FHMpy.scenario import (ScriptError, parse_functional, parse_script, run_scenario, certify_statement1,
                            certify_statement3)


class TestParsing(object):

    """ Certification script syntax """

    def test_functional(self):

        assert parse_functional('p1,o1+p1,o2') == {(0, 0): 1, (0, 1): 1}

    def test_functional_coefficients(self):

        assert parse_functional('2*p1,o4-p2,o4') == {(0, 3): 2, (1, 3): -1}
        assert parse_functional('1/2*p1,o_2') == {(0, 1): Fraction(1, 2)}

    def test_functional_bad_term(self):

        with pytest.raises(ScriptError):
            parse_functional('q1')

    def test_directives(self):

        directives = parse_script('constraints IR\n\nforced eq p1,o1+p1,o2 1/2  # comment\nexpect infeasible\n')

        assert [d.kind for d in directives] == ['constraints', 'forced', 'expect']
        assert directives[1].line == 3

    def test_unknown_directive_line(self):

        with pytest.raises(ScriptError) as err:
            parse_script('# only a comment\nfrobnicate 1\n')

        assert err.value.line == 2

    def test_bad_forced_mode(self):

        with pytest.raises(ScriptError):
            parse_script('forced xx p1,o1 1')

    def test_bad_expectation(self):

        with pytest.raises(ScriptError):
            parse_script('expect feasible')

    def test_singleton_coalition(self):

        with pytest.raises(ScriptError):
            parse_script('best-exchange 1 1 0 | 0 1')

    def test_bad_tags(self):

        with pytest.raises(ScriptError):
            parse_script('constraints FOO')

    def test_uniform_block_needs_over(self):

        with pytest.raises(ScriptError):
            parse_script('uniform-block 1,3 0 1/2 0 1/2 | 1/2 0 1/2 0')


class TestStrongCoreEmptiness(object):

    def test_certified(self, e1):

        report = certify_statement1(e1)

        assert report.certified
        assert report.verdict == 'STRONG CORE EMPTY: certified'

    def test_forced_values(self, e1):

        step = certify_statement1(e1).steps[1]

        assert step.kind == 'forced'
        assert step.values['min'] == Fraction(1, 2) and step.values['max'] == Fraction(1, 2)

    def test_farkas_step(self, e1):

        step = certify_statement1(e1).steps[-1]

        assert step.kind == 'expect'
        assert 'farkas' in step.values
        assert step.lines[0].startswith('infeasible: Farkas certificate verified')

    def test_other_profile_fails(self, e1_prime):

        report = certify_statement1(e1_prime)

        assert not report.certified
        assert report.failed_step.kind == 'best-exchange'
        assert 'FAILED at best-exchange' in report.verdict

    def test_incomplete_script(self, e1):

        report = certify_statement1(e1, script='constraints IR\nforced eq p1,o1+p1,o2 1/2\n')

        assert not report.certified
        assert report.missing == ['best-exchange', 'conclude-equalities', 'expect']
        assert 'lacks' in report.verdict

    def test_unjustified_equalities(self, e1):

        report = run_scenario(e1, parse_script('constraints IR\nconclude-equalities p1 = 0 1/2 0 1/2\n'))

        assert report.failed_step.kind == 'conclude-equalities'


class TestWeakCoreEENE(object):

    """ Every IR+EENE allocation blocked by one fixed exchange """

    def test_certified(self, e1_prime):

        report = certify_statement3(e1_prime)

        assert report.certified
        assert report.verdict == 'WEAK CORE ∩ EENE = ∅: certified'

    def test_block_certificate(self, e1_prime):

        cert = certify_statement3(e1_prime).steps[-1].values['certificate']

        assert cert.coalition == (0, 2)
        assert cert.gaps[2][0] == Fraction(1, 4)

    def test_fails_on_e1(self, e1):

        assert not certify_statement3(e1).certified

    def test_requires_eene(self, e1_prime):

        script = 'constraints IR\nuniform-block 1,3 0 1/2 0 1/2 | 1/2 0 1/2 0 over IR\n'

        assert not certify_statement3(e1_prime, script=script).certified

    def test_report_lines(self, e1_prime):

        lines = certify_statement3(e1_prime).to_lines()

        assert lines[0].startswith('[ok] constraints')
        assert lines[-1] == 'WEAK CORE ∩ EENE = ∅: certified'
