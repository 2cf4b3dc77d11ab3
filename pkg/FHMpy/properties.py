"""
Seeded property suites. Each suite draws random instances from a numpy RandomState, runs the exact checks and
returns a pandas DataFrame with one row per instance and a boolean 'ok' column; a False entry is a counterexample.
"""

import warnings
from collections import OrderedDict
from fractions import Fraction
from itertools import combinations

import numpy as np
import pandas as pd

from FHMpy import ratlp
from FHMpy.blocking import WEAK, STRONG, brute_force_block, strong_block_lp, weak_block_lp
from FHMpy.core import in_strong_core, ttc
from FHMpy.dominance import satisfies_EENE, satisfies_ETE
from FHMpy.economy import Economy, bundled_economy
from FHMpy.equilibrium import find_weak_core_ETE, symmetrize, verify_weak_core_ETE
from FHMpy.utils import check_random_state, random_doubly_stochastic, random_permutation_matrix, \
    random_preferences


def random_economy(n, seed=None, maxden=4, integral=False, twins=False):

    """
    A random economy

    Args:
        n: Number of agents
        seed: Seed or RandomState
        maxden: Endowments are multiples of 1/maxden (ignored when integral)
        integral: Deterministic endowments (a random permutation matrix)
        twins: Make agents 1 and 2 equals (same order, averaged endowments)

    Returns:
        Economy
    """

    rng = check_random_state(seed)
    prefs = list(random_preferences(n, rng))
    if integral:
        omega = random_permutation_matrix(n, rng)
    else:
        omega = random_doubly_stochastic(n, rng, maxden=maxden)
    if twins and n > 1:
        prefs[1] = prefs[0]
        omega = symmetrize(omega, ((0, 1),) + tuple((i,) for i in range(2, n)))
    return Economy(prefs, omega)


def ttc_suite(count=200, max_n=6, seed=0):

    """
    TTC outcomes of random integral markets lie in the strong core
    """

    rng = check_random_state(seed)
    rows = []
    for trial in range(count):
        n = int(rng.randint(2, max_n + 1))
        e = random_economy(n, rng, integral=True)
        report = in_strong_core(e, ttc(e))
        rows.append(dict(trial=trial, n=n, checked=report.checked, ok=report.member))
    return pd.DataFrame(rows, columns=['trial', 'n', 'checked', 'ok'])


def eene_ete_suite(count=500, max_n=4, seed=0):

    """
    EENE implies ETE on random (economy, allocation) pairs

    Half of the economies have a pair of equals and half of the allocations are symmetrised over it, so both
    properties hold often enough to be tested.
    """

    rng = check_random_state(seed)
    rows = []
    for trial in range(count):
        n = int(rng.randint(2, max_n + 1))
        twins = bool(rng.rand() < 0.5)
        e = random_economy(n, rng, twins=twins)
        p = random_doubly_stochastic(n, rng, maxden=4)
        if rng.rand() < 0.5:
            p = symmetrize(p, ((0, 1),) + tuple((i,) for i in range(2, n)))
        eene, ete = satisfies_EENE(e, p)[0], satisfies_ETE(e, p)[0]
        rows.append(dict(trial=trial, n=n, twins=twins, eene=eene, ete=ete, ok=ete or not eene))
    return pd.DataFrame(rows, columns=['trial', 'n', 'twins', 'eene', 'ete', 'ok'])


def random_lp(seed=None, max_vars=20, max_constraints=30, max_coef=5, density=0.5):

    """
    A random LP with small rational data, mixed relations and bounds (free, boxed, shifted)
    """

    rng = check_random_state(seed)
    n_vars = int(rng.randint(1, max_vars + 1))
    m = int(rng.randint(1, max_constraints + 1))
    lp = ratlp.LinearProgram(n_vars, sense=str(rng.choice(['max', 'min'])))

    def rational():
        return Fraction(int(rng.randint(-max_coef, max_coef + 1)), int(rng.randint(1, 4)))

    for _ in range(m):
        coefs = [rational() if rng.rand() < density else 0 for _ in range(n_vars)]
        lp.add_constraint(coefs, str(rng.choice(ratlp.RELATIONS)), rational() * 2)
    for j in range(n_vars):
        r = rng.rand()
        if r < 0.1:
            lp.set_bounds(j, None)
        elif r < 0.3:
            lp.set_bounds(j, 0, int(rng.randint(1, 6)))
        elif r < 0.4:
            lp.set_bounds(j, int(rng.randint(-3, 1)))
    lp.set_objective([rational() for _ in range(n_vars)])
    return lp


def lp_suite(count=1000, seed=0, max_vars=20, max_constraints=30):

    """
    Every solve outcome on random LPs carries a certificate that check_certificate accepts
    """

    rng = check_random_state(seed)
    rows = []
    for trial in range(count):
        lp = random_lp(rng, max_vars, max_constraints)
        out = ratlp.solve(lp)
        rows.append(dict(trial=trial, n_vars=lp.n_vars, n_constraints=len(lp.constraints), status=out.status,
                         pivots=out.pivots, ok=ratlp.check_certificate(lp, out)))
    return pd.DataFrame(rows, columns=['trial', 'n_vars', 'n_constraints', 'status', 'pivots', 'ok'])


def blocking_suite(count=30, seed=0, max_n=3, step=Fraction(1, 8), min_n=2):

    """
    Blocking LPs against the grid oracle

    For every coalition and both modes: a block found by brute force on the step grid must also be found by the
    LP, and every LP certificate must re-verify by substitution. Economies and allocations are drawn on the grid,
    with min_n to max_n agents.
    """

    if not 2 <= min_n <= max_n:
        raise ValueError("Need 2 <= min_n <= max_n, got {0} and {1}".format(min_n, max_n))
    rng = check_random_state(seed)
    k = int(1 / Fraction(step))
    rows = []
    for trial in range(count):
        n = int(rng.randint(min_n, max_n + 1))
        e = random_economy(n, rng, maxden=k)
        p = random_doubly_stochastic(n, rng, maxden=k)
        for size in range(2, n + 1):
            for s in combinations(range(n), size):
                for mode, solve in ((WEAK, weak_block_lp), (STRONG, strong_block_lp)):
                    brute = brute_force_block(e, p, s, mode, step)
                    cert = solve(e, p, s)
                    ok = not (brute is not None and cert is None) and (cert is None or cert.verify(e, p))
                    rows.append(dict(trial=trial, n=n, coalition=','.join(str(i + 1) for i in s), mode=mode,
                                     brute=brute is not None, lp=cert is not None, ok=ok))
    return pd.DataFrame(rows, columns=['trial', 'n', 'coalition', 'mode', 'brute', 'lp', 'ok'])


def find_core_suite(count=100, seed=0, max_n=5, include_bundled=True, **kwargs):

    """
    The weak-core finder on random economies (plus the bundled E1 profiles)

    'verified' records whether the finder returned an allocation; 'ok' re-checks a returned allocation with fresh
    exact verifiers, so a False entry means the finder returned something that is not a weak-core ETE allocation.
    Extra keyword arguments go to find_weak_core_ETE.
    """

    rng = check_random_state(seed)
    instances = []
    if include_bundled:
        instances.extend([('e1', bundled_economy('e1.txt')), ('e1_prime', bundled_economy('e1_prime.txt'))])
    for trial in range(count):
        n = int(rng.randint(2, max_n + 1))
        instances.append(('random{0}'.format(trial), random_economy(n, rng, twins=bool(rng.rand() < 0.5))))

    rows = []
    for name, e in instances:
        with warnings.catch_warnings():
            warnings.simplefilter('ignore')
            result = find_weak_core_ETE(e, seed=int(rng.randint(2 ** 31 - 1)), **kwargs)
        recheck = verify_weak_core_ETE(e, result.allocation).passed if result.verified else True
        eene = satisfies_EENE(e, result.allocation)[0] if result.verified else np.nan
        rows.append(dict(instance=name, n=e.n, verified=result.verified, eps_solved=len(result.iterates),
                         maxden=result.maxden, source=result.source, eene=eene, ok=recheck))
    return pd.DataFrame(rows, columns=['instance', 'n', 'verified', 'eps_solved', 'maxden', 'source', 'eene', 'ok'])


SUITES = OrderedDict([('ttc', ttc_suite), ('eene-ete', eene_ete_suite), ('lp', lp_suite),
                      ('blocking', blocking_suite), ('find-core', find_core_suite)])


def run_suite(name, count=None, seed=0):

    """
    Runs a suite by name with its default size unless count is given
    """

    if name not in SUITES:
        raise ValueError("Unknown suite '{0}', expected one of {1}".format(name, list(SUITES)))
    if count is None:
        return SUITES[name](seed=seed)
    return SUITES[name](count=count, seed=seed)


def counterexamples(table):
    return table[~table['ok'].astype(bool)]
