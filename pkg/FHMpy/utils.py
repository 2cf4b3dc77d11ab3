import re
import hashlib
from fractions import Fraction

import numpy as np


_RATIONAL = re.compile(r'^[+-]?(\d+(/\d+)?|\d*\.\d+)$')


class ParseError(ValueError):

    """
    Raised when a text file (economy, allocation, utilities) cannot be parsed

    Args:
        message: Description of the problem
        line: 1-based line number in the source text, if known
        column: 1-based column number in the source text, if known
    """

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None and column is not None:
            message = "line {0}, column {1}: {2}".format(line, column, message)
        elif line is not None:
            message = "line {0}: {1}".format(line, message)
        super(ParseError, self).__init__(message)


def parse_rational(token, line=None, column=None):

    """
    Parses an exact rational from an integer, "a/b" or decimal literal

    Args:
        token: String to parse
        line: Line number reported on failure
        column: Column number reported on failure

    Returns:
        A Fraction in lowest terms
    """

    if not _RATIONAL.match(token):
        raise ParseError("'{0}' is not a rational number".format(token), line, column)
    try:
        return Fraction(token)
    except ZeroDivisionError:
        raise ParseError("'{0}' has a zero denominator".format(token), line, column)


def format_rational(q):

    """
    Formats a rational as "a/b" in lowest terms, or as an integer when the denominator is 1
    """

    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return '{0}/{1}'.format(q.numerator, q.denominator)


def as_fraction(x):

    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        return parse_rational(x)
    raise TypeError("Expected an exact rational (Fraction, int or string), got {0}".format(type(x)))


def object_matrix(rows, shape=None):

    """
    Builds a read-only numpy array of Fractions

    Exact quantities are held in object arrays so numpy indexing, slicing and sums work while every entry stays a
    Fraction. The array is flagged non-writeable; derive new matrices rather than mutating.

    Args:
        rows: Nested sequence (or array) of rationals
        shape: Optional expected shape, checked after conversion

    Returns:
        numpy array with dtype object
    """

    rows = [[as_fraction(x) for x in row] for row in rows]
    if len(set(len(row) for row in rows)) > 1:
        raise ValueError("Rows have unequal lengths: {0}".format([len(row) for row in rows]))
    m = np.empty((len(rows), len(rows[0]) if rows else 0), dtype=object)
    for i, row in enumerate(rows):
        m[i, :] = row
    if shape is not None and m.shape != tuple(shape):
        raise ValueError("Expected a matrix of shape {0}, got {1}".format(tuple(shape), m.shape))
    m.flags.writeable = False
    return m


def object_vector(values):

    values = [as_fraction(x) for x in values]
    v = np.empty(len(values), dtype=object)
    v[:] = values
    v.flags.writeable = False
    return v


def format_row(row):

    return ' '.join(format_rational(x) for x in row)


def format_matrix(m):

    return '\n'.join(format_row(row) for row in m)


def digest(data):

    """
    Short SHA-256 digest of file contents, used to identify inputs in reports
    """

    if isinstance(data, str):
        data = data.encode('utf-8')
    return hashlib.sha256(data).hexdigest()[:16]


def check_random_state(seed):

    """
    Turns a seed (int or None) into a numpy RandomState; passes RandomState instances through unchanged
    """

    if isinstance(seed, np.random.RandomState):
        return seed
    return np.random.RandomState(seed)


def sinkhorn(m, n_iter=50, eps=1e-12):

    """
    Alternating row and column normalisation of a positive matrix

    Args:
        m: Positive float matrix
        n_iter: Number of row/column normalisation rounds
        eps: Added to sums to avoid division by zero

    Returns:
        A float matrix whose rows and columns approximately sum to 1
    """

    h = np.asarray(m, dtype=float).copy()
    for _ in range(n_iter):
        h /= h.sum(axis=1, keepdims=True) + eps
        h /= h.sum(axis=0, keepdims=True) + eps
    return h


def _northwest_repair(k, target):

    # Integer matrix with row and column sums <= target; fills deficits so all sums equal target.
    k = k.copy()
    row_def = target - k.sum(axis=1)
    col_def = target - k.sum(axis=0)
    i, j = 0, 0
    n = k.shape[0]
    while i < n and j < n:
        if row_def[i] == 0:
            i += 1
            continue
        if col_def[j] == 0:
            j += 1
            continue
        step = min(row_def[i], col_def[j])
        k[i, j] += step
        row_def[i] -= step
        col_def[j] -= step
    return k


def random_doubly_stochastic(n, seed=None, maxden=64, n_iter=50):

    """
    Samples an exact doubly stochastic matrix with entries in multiples of 1/maxden

    A positive random matrix is Sinkhorn-scaled, floored onto the 1/maxden grid, and the leftover mass is put back
    with a northwest-corner pass so row and column sums are exactly 1.

    Args:
        n: Matrix size
        seed: Seed or RandomState
        maxden: Common denominator of the entries
        n_iter: Sinkhorn rounds

    Returns:
        Read-only object matrix of Fractions
    """

    rng = check_random_state(seed)
    h = sinkhorn(rng.exponential(size=(n, n)), n_iter=n_iter)
    k = np.floor(h * maxden).astype(np.int64)
    k = np.minimum(k, maxden)
    while (k.sum(axis=1) > maxden).any() or (k.sum(axis=0) > maxden).any():
        k[np.unravel_index(np.argmax(k), k.shape)] -= 1
    k = _northwest_repair(k, maxden)
    return object_matrix([[Fraction(int(x), maxden) for x in row] for row in k])


def random_permutation_matrix(n, seed=None):

    rng = check_random_state(seed)
    perm = rng.permutation(n)
    return object_matrix([[1 if perm[i] == o else 0 for o in range(n)] for i in range(n)])


def random_preferences(n, seed=None):

    rng = check_random_state(seed)
    return tuple(tuple(int(o) for o in rng.permutation(n)) for _ in range(n))
