"""Embedded benchmark polynomials and the reference result tables.

Two small real polynomials (a 2x2 cubic and a 3x3 quadratic) with published
bound and distance values for multiplicities 2..6, at two target points each
and under both coefficient norms.  Values retain all reported digits; the
nonconvex searches behind them mean agreement is expected only to roughly two
digits, and a tighter bound than the recorded one is an improvement, not a
mismatch.
"""

from dataclasses import dataclass


from .polynomials import MatrixPolynomial

__all__ = ["EXAMPLE1", "EXAMPLE2", "TableSpec", "TABLES", "reference_distance"]

EXAMPLE1 = MatrixPolynomial.from_matrices([
    [[-.1414, -.1490], [1.1928, .9702]],
    [[.8837, .9969], [.2190, .0259]],
    [[.6346, .9689], [.6252, -.0649]],
    [[-1.9867, 1.2800], [.6097, -.1477]],
])

EXAMPLE2 = MatrixPolynomial.from_matrices([
    [[2.7694, 0.7254, -0.2050], [-1.3499, -0.0631, -0.1241], [3.0349, .7147, 1.4897]],
    [[1.4090, -1.2075, 0.4889], [1.4172, 0.7172, 1.0347], [0.6715, 1.6302, 0.7269]],
    [[-0.3034, 0.8884, -0.8095], [0.2939, -1.1471, -2.9443], [-0.7873, -1.0689, 1.4384]],
])


@dataclass(frozen=True)
class TableSpec:
    """One reference table: an example, a target point, a norm, and its rows.

    Row columns: (lb_scaling, lb_sigma, bfgs, globalsearch, upper); the bfgs
    column is None for the spectral-norm tables, which were computed with the
    gradient-free search only.
    """

    number: int
    example: int                 # 1 or 2
    lambda0: float
    norm: str                    # "F" or "2"
    rows: dict                   # multiplicity -> column tuple

    @property
    def polynomial(self) -> MatrixPolynomial:
        return EXAMPLE1 if self.example == 1 else EXAMPLE2


TABLES = {
    1: TableSpec(1, 1, 0.0, "F", {
        2: (0.10797922, 0.10683102, 0.14992951, 0.14992951, 0.1504944),
        3: (0.17943541, 0.17354340, 0.27433442, 0.27433442, 0.27996519),
        4: (0.83444419, 0.65889251, 1.41424988, 1.41424988, 1.4189444),
        5: (0.90827444, 0.75348431, 1.46326471, 1.46326471, 1.47185479),
        6: (0.99263034, 0.85789363, 1.66359899, 1.66359899, 1.72452708),
    }),
    2: TableSpec(2, 1, 1.0, "F", {
        2: (1.35798224, 0.70551994, 1.35814780, 1.35814780, 1.39370758),
        3: (1.35690676, 0.57675049, 1.42078740, 1.42078740, 1.57015806),
        4: (1.35798160, 0.56881053, 1.42220397, 1.42220397, 1.76028594),
        5: (1.35689708, 0.56908887, 1.45865399, 1.45865399, 1.82967789),
        6: (1.35690633, 0.56789237, 1.46349849, 1.46349849, 1.57008146),
    }),
    3: TableSpec(3, 1, 0.0, "2", {
        2: (0.10797922, 0.10683102, None, 0.10797922, 0.11368413),
        3: (0.17943541, 0.17354340, None, 0.19516063, 0.21687613),
        4: (0.83444419, 0.65889251, None, 1.04436762, 1.05968598),
        5: (0.90827444, 0.75348431, None, 1.13265970, 1.20943709),
        6: (0.99263034, 0.85789363, None, 1.55726928, 1.70199290),
    }),
    4: TableSpec(4, 1, 1.0, "2", {
        2: (1.35798224, 0.70551994, None, 1.35798224, 1.35827634),
        3: (1.35690676, 0.57675049, None, 1.35805109, 1.35813196),
        4: (1.35798160, 0.56881053, None, 1.35805159, 1.56108421),
        5: (1.35689708, 0.56908887, None, 1.35805160, 1.52575381),
        6: (1.35690633, 0.56789237, None, 1.416503376, 1.43921050),
    }),
    5: TableSpec(5, 2, 0.0, "F", {
        2: (0.25800277, 0.25750097, 0.25904415, 0.25904415, 0.268796),
        3: (0.43621850, 0.38556596, 0.69617957, 0.69617957, 0.82200773),
        4: (0.88752500, 0.83727454, 1.84231345, 1.84231345, 2.04437686),
        5: (1.19949290, 1.13421484, 1.84468801, 1.84468801, 2.43953618),
        6: (1.28885600, 1.07999296, 2.60665217, 2.60665222, 2.76918876),
    }),
    6: TableSpec(6, 2, -1.0, "F", {
        2: (0.99413714, 0.49049043, 1.14436402, 1.14436402, 1.14869786),
        3: (1.23816383, 0.57712979, 2.22703947, 2.22703947, 2.37565159),
        4: (1.33820455, 0.56416354, 2.33112163, 2.33112163, 2.51177974),
        5: (1.36050277, 0.59682624, 2.44152499, 2.44152500, 2.89719526),
        6: (1.46702487, 0.61024547, 2.62503371, 2.64810973, 2.93776340),
    }),
    7: TableSpec(7, 2, 0.0, "2", {
        2: (0.25800277, 0.25750097, None, 0.25802766, 0.2581792),
        3: (0.43621850, 0.38556596, None, 0.47215137, 0.58937606),
        4: (0.88752500, 0.83727454, None, 1.11581440, 1.57310992),
        5: (1.19949290, 1.13421484, None, 1.49604879, 1.83989133),
        6: (1.28885600, 1.07999296, None, 1.90820166, 2.39309442),
    }),
    8: TableSpec(8, 2, -1.0, "2", {
        2: (0.99413714, 0.49049043, None, 0.99413892, 1.08915666),
        3: (1.23816383, 0.57712979, None, 1.44794214, 1.95311420),
        4: (1.33820455, 0.56416354, None, 1.49553573, 1.92278887),
        5: (1.36050277, 0.59682624, None, 1.70157792, 2.04844570),
        6: (1.46702487, 0.61024547, None, 2.19715515, 2.64000204),
    }),
}


def reference_distance(table: int, multiplicity: int) -> float:
    """The distance value a computation is compared against.

    For the Frobenius tables this is the gradient-based column (equal to the
    search column except one row, where the smaller of the two applies); the
    spectral tables carry only the search column.
    """
    row = TABLES[table].rows[multiplicity]
    lb2, lb1, bfgs, gsearch, upper = row
    if bfgs is None:
        return gsearch
    return min(bfgs, gsearch)
