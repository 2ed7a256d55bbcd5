import pytest

from vmlattice.numtheory import mod_inverse

# N, z, wce^2 (Sobolev), wce^2 (Korobov), mixture; gamma = 1, Korobov part with
# weights gamma / (2 pi^2), so both squared errors are the table-convention columns
TABLE_ROWS = [
    (17, 5, 2.16e-3, 1.92e-3, 2.39e-4),
    (37, 11, 5.33e-4, 4.57e-4, 7.63e-5),
    (67, 18, 1.73e-4, 1.46e-4, 2.66e-5),
    (131, 76, 4.67e-5, 3.92e-5, 7.47e-6),
    (257, 76, 1.37e-5, 1.12e-5, 2.47e-6),
    (521, 377, 3.48e-6, 2.83e-6, 6.48e-7),
    (1031, 743, 9.75e-7, 7.81e-7, 1.94e-7),
    (2053, 794, 2.70e-7, 2.13e-7, 5.70e-8),
    (4099, 2511, 7.06e-8, 5.53e-8, 1.53e-8),
]

SMALL_TABLE_ROWS = TABLE_ROWS[:4]


def generator_orbit(z, N):
    """z, its mirror and their inverses: all give the same two-dimensional error."""
    inverse = mod_inverse(z, N)
    return {z, N - z, inverse, N - inverse}


def three_figures(value, reference):
    return value == pytest.approx(reference, rel=5e-3)


@pytest.fixture
def table_rows():
    return TABLE_ROWS
