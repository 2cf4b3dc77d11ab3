import os

import pytest

from FHMpy.cli import main, RunReport, EXIT_OK, EXIT_INVALID, EXIT_IO, EXIT_REJECTED
from FHMpy.economy import DATA_DIR, bundled_economy, parse_allocation, serialize_allocation


E1 = os.path.join(DATA_DIR, 'e1.txt')
E1_PRIME = os.path.join(DATA_DIR, 'e1_prime.txt')
TTC3 = os.path.join(DATA_DIR, 'ttc3.txt')
WEAK_CORE = os.path.join(DATA_DIR, 'e1_weak_core.alloc')


@pytest.fixture()
def endowment_file(tmp_path):

    path = tmp_path / 'omega.alloc'
    path.write_text(serialize_allocation(bundled_economy('e1.txt').endowments))
    return str(path)


@pytest.fixture()
def symmetric_file(tmp_path):

    path = tmp_path / 'symmetric.txt'
    path.write_text('2\no_1 o_2\no_1 o_2\n1/2 1/2\n1/2 1/2\n')
    return str(path)


class TestValidate(object):

    """ fhmpy validate """

    def test_bundled(self, capsys):

        assert main(['validate', '--economy', E1]) == EXIT_OK
        assert 'valid: yes' in capsys.readouterr().out

    def test_row_sum(self, tmp_path, capsys):

        path = tmp_path / 'bad.txt'
        path.write_text('2\no_1 o_2\no_1 o_2\n1/2 1/2\n1/2 1/4\n')

        assert main(['validate', '--economy', str(path)]) == EXIT_INVALID
        assert 'valid: no' in capsys.readouterr().out

    def test_missing_file(self, tmp_path):

        assert main(['validate', '--economy', str(tmp_path / 'nothing.txt')]) == EXIT_IO

    def test_parse_error(self, tmp_path):

        path = tmp_path / 'bad.txt'
        path.write_text('two\n')

        assert main(['validate', '--economy', str(path)]) == EXIT_INVALID

    def test_with_allocation(self):

        assert main(['validate', '--economy', E1, '--allocation', WEAK_CORE]) == EXIT_OK

    def test_no_command(self, capsys):

        assert main([]) == EXIT_INVALID


class TestCheck(object):

    def test_endowment_properties(self, endowment_file, capsys):

        assert main(['check', '--economy', E1, '--allocation', endowment_file]) == EXIT_OK
        out = capsys.readouterr().out

        assert 'ir: yes' in out
        assert 'ete: yes' in out
        assert 'eene: yes' in out
        assert 'sdeff: no' in out
        assert 'envy: agent 1 envies agent 3' in out

    def test_subset(self, capsys):

        assert main(['check', '--economy', E1, '--allocation', WEAK_CORE, '--properties', 'ir,ete']) == EXIT_OK
        out = capsys.readouterr().out

        assert 'ir: yes' in out and 'eene' not in out

    def test_size_mismatch(self, tmp_path):

        path = tmp_path / 'small.alloc'
        path.write_text('1 0\n0 1\n')

        assert main(['check', '--economy', E1, '--allocation', str(path)]) == EXIT_INVALID

    def test_unknown_property(self):

        assert main(['check', '--economy', E1, '--allocation', WEAK_CORE, '--properties', 'ir,pareto']) == \
            EXIT_INVALID


class TestCore(object):

    """ fhmpy core """

    def test_blocked_endowment(self, endowment_file, capsys):

        assert main(['core', '--economy', E1, '--allocation', endowment_file]) == EXIT_REJECTED
        out = capsys.readouterr().out

        assert 'weak core: non-member' in out
        assert 'coalition: 1, 3' in out

    def test_weak_core_member(self, capsys):

        assert main(['core', '--economy', E1, '--allocation', WEAK_CORE]) == EXIT_OK

    def test_strong_core_empty(self):

        assert main(['core', '--economy', E1, '--allocation', WEAK_CORE, '--notion', 'strong']) == EXIT_REJECTED

    def test_ttc_strong_core(self, tmp_path):

        path = tmp_path / 'ttc.alloc'
        path.write_text('0 1 0\n1 0 0\n0 0 1\n')

        assert main(['core', '--economy', TTC3, '--allocation', str(path), '--notion', 'strong']) == EXIT_OK

    def test_structured(self, endowment_file, capsys):

        main(['--format', 'structured', 'core', '--economy', E1, '--allocation', endowment_file])
        out = capsys.readouterr().out

        assert 'verdict.weak_core=non-member' in out
        assert 'command=core' in out


class TestReproduce(object):

    def test_statement1(self, capsys):

        assert main(['reproduce', 'statement1']) == EXIT_OK
        assert 'result: STRONG CORE EMPTY: certified' in capsys.readouterr().out

    def test_statement3(self, capsys):

        assert main(['reproduce', 'statement3']) == EXIT_OK
        assert 'WEAK CORE ∩ EENE = ∅: certified' in capsys.readouterr().out

    def test_wrong_economy(self, capsys):

        assert main(['reproduce', 'statement1', '--economy', E1_PRIME]) == EXIT_REJECTED
        assert 'FAILED at best-exchange' in capsys.readouterr().out

    def test_bad_script(self, tmp_path):

        path = tmp_path / 'bad.script'
        path.write_text('frobnicate\n')

        assert main(['reproduce', 'statement1', '--script', str(path)]) == EXIT_INVALID

    def test_deterministic(self, capsys):

        main(['reproduce', 'statement3'])
        first = capsys.readouterr().out
        main(['reproduce', 'statement3'])

        assert capsys.readouterr().out == first

    def test_timings_opt_in(self, capsys):

        main(['--timings', 'reproduce', 'statement1'])

        assert 'time reproduce:' in capsys.readouterr().out


class TestFindCore(object):

    def test_symmetric_market(self, symmetric_file, tmp_path, capsys):

        output = str(tmp_path / 'found.alloc')

        assert main(['find-core', '--economy', symmetric_file, '--schedule', '4', '--output', output]) == EXIT_OK
        assert 'weak core ETE: verified' in capsys.readouterr().out
        with open(output) as f:
            p = parse_allocation(f.read(), 2)
        assert all(str(v) == '1/2' for v in p.ravel())

    def test_utilities_file(self, symmetric_file, tmp_path):

        path = tmp_path / 'u.txt'
        path.write_text('3 1\n3 1\n')

        assert main(['find-core', '--economy', symmetric_file, '--schedule', '4', '--utilities', str(path)]) == \
            EXIT_OK


def test_properties_command(capsys):

    assert main(['properties', 'ttc', '--count', '3']) == EXIT_OK
    assert 'counterexamples: 0' in capsys.readouterr().out


def test_report_rendering():

    """
    Sections come before verdicts and timings only appear on request
    """

    report = RunReport('demo', seed=1)
    report.add_section('notes', ['a', 'b'])
    report.add_verdict('result', 'ok')
    report.timings['demo'] = 0.5

    assert report.render() == 'command: demo\nseed: 1\n\n== notes ==\na\nb\n\nresult: ok\n'
    assert 'section.notes.2=b' in report.render('structured')
    assert 'time demo: 0.500 s' in report.render(timings=True)

    with pytest.raises(ValueError):
        report.render('json')
