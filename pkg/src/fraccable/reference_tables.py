"""Published convergence tables for the three benchmark problems.

Each :class:`TableBlock` is one parameter pair ``(gamma, kappa)`` with one
``(theta_gamma, theta_kappa)`` choice, refined either in ``tau`` or in
``h``.  Columns are keyed by correction mode: ``"corrected"`` uses
starting weights, ``"baseline"`` omits them (BDF2 keeps its exact first
step), ``"off"`` is the plain convolution used for the smooth 2D case.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

__all__ = ["TableBlock", "ColumnRef", "TABLES", "TABLE_IDS", "table_blocks"]

E1 = "Example1_1D_weak"
ML = "Example1_ML"
E2 = "Example2_2D_smooth"


@dataclass(frozen=True)
class ColumnRef:
    label: str
    errors: tuple
    rates: tuple

    def __post_init__(self):
        if len(self.rates) != len(self.errors) - 1:
            raise ValueError("a column needs one rate per refinement step")


@dataclass(frozen=True)
class TableBlock:
    table: str
    case: str
    family: str
    gamma: float
    kappa: float
    theta_gamma: float
    theta_kappa: float
    refine: str
    n_steps: tuple
    n_cells: tuple
    columns: dict = field(default_factory=dict)
    # n_cells used when the full published resolution is not requested
    desk_n_cells: Optional[tuple] = None

    @property
    def levels(self) -> int:
        return max(len(self.n_steps), len(self.n_cells))

    def grid(self, paper_scale: bool = False):
        """``(n_steps, n_cells)`` pairs in refinement order."""
        cells = self.n_cells if paper_scale or self.desk_n_cells is None else self.desk_n_cells
        steps = self.n_steps * self.levels if len(self.n_steps) == 1 else self.n_steps
        cells = cells * self.levels if len(cells) == 1 else cells
        return list(zip(steps, cells))


_TAU4 = (10, 20, 40, 80)
_TAU3 = (10, 20, 40)


def _t12(table, family, gk, th, ec, rc, eo, ro):
    return TableBlock(
        table, E1, family, gk[0], gk[1], th[0], th[1], "tau", _TAU4, (5000,),
        {"corrected": ColumnRef("E_c", ec, rc), "baseline": ColumnRef("E_o", eo, ro)},
    )


_TABLE1 = [
    _t12("1", "fbt", (0.3, 0.9), (0, 0),
         (1.05368e-02, 1.89214e-03, 5.54574e-04, 1.47119e-04), (2.4773, 1.7706, 1.9144),
         (2.12608e-01, 1.68531e-01, 1.34676e-01, 1.08343e-01), (0.3352, 0.3235, 0.3139)),
    _t12("1", "fbt", (0.3, 0.9), (0, 0.49),
         (1.05368e-02, 1.88811e-03, 5.53517e-04, 1.46853e-04), (2.4804, 1.7702, 1.9143),
         (2.12639e-01, 1.68546e-01, 1.34683e-01, 1.08346e-01), (0.3353, 0.3236, 0.3139)),
    _t12("1", "fbt", (0.3, 0.9), (-0.5, 0.4),
         (1.05368e-02, 3.48719e-03, 9.75418e-04, 2.55089e-04), (1.5953, 1.8380, 1.9350),
         (1.93626e-01, 1.54923e-01, 1.24618e-01, 1.00755e-01), (0.3217, 0.3140, 0.3067)),
    _t12("1", "fbt", (0.6, 0.5), (-1, 0.49),
         (1.07168e-02, 3.08842e-03, 8.19626e-04, 2.10349e-04), (1.7949, 1.9138, 1.9622),
         (6.60333e-02, 4.90893e-02, 3.70115e-02, 2.83526e-02), (0.4278, 0.4074, 0.3845)),
    _t12("1", "fbt", (0.6, 0.5), (0.4, -1),
         (3.79088e-03, 6.62162e-04, 1.77051e-04, 4.51734e-05), (2.5173, 1.9030, 1.9706),
         (1.06932e-01, 7.55151e-02, 5.37684e-02, 3.86893e-02), (0.5019, 0.4900, 0.4748)),
    _t12("1", "fbt", (0.6, 0.5), (-0.5, 0),
         (8.02601e-03, 2.26675e-03, 5.95408e-04, 1.51931e-04), (1.8241, 1.9287, 1.9705),
         (7.20953e-02, 5.29315e-02, 3.93943e-02, 2.97853e-02), (0.4458, 0.4261, 0.4034)),
    _t12("1", "fbt", (0.9, 0.1), (0.49, 0.49),
         (2.63144e-03, 6.56725e-04, 1.75731e-04, 4.60032e-05), (2.0025, 1.9019, 1.9336),
         (2.12803e-01, 2.52160e-01, 2.88481e-01, 3.13814e-01), (-0.2448, -0.1941, -0.1214)),
    _t12("1", "fbt", (0.9, 0.1), (-0.1, 0.49),
         (2.63144e-03, 6.56725e-04, 1.75731e-04, 4.60032e-05), (2.0025, 1.9019, 1.9336),
         (2.03506e-01, 2.46765e-01, 2.85689e-01, 3.12513e-01), (-0.2781, -0.2113, -0.1295)),
    _t12("1", "fbt", (0.9, 0.1), (0.49, -1),
         (2.63144e-03, 6.56725e-04, 1.75731e-04, 4.60032e-05), (2.0025, 1.9019, 1.9336),
         (1.82841e-01, 2.20926e-01, 2.59419e-01, 2.89589e-01), (-0.2730, -0.2317, -0.1587)),
]

_TABLE2 = [
    _t12("2", "fbn", (0.4, 0.8), (0, 0),
         (6.80886e-03, 1.83124e-03, 5.00615e-04, 1.29413e-04), (1.8946, 1.8711, 1.9517),
         (1.37556e-01, 1.01102e-01, 7.49161e-02, 5.59986e-02), (0.4442, 0.4325, 0.4199)),
    _t12("2", "fbn", (0.4, 0.8), (0, 0.5),
         (6.80886e-03, 1.82753e-03, 4.99636e-04, 1.29161e-04), (1.8975, 1.8709, 1.9517),
         (1.37586e-01, 1.01118e-01, 7.49240e-02, 5.60028e-02), (0.4443, 0.4325, 0.4199)),
    _t12("2", "fbn", (0.4, 0.8), (0, 1),
         (6.80886e-03, 1.83526e-03, 5.01635e-04, 1.29670e-04), (1.8914, 1.8713, 1.9518),
         (1.37480e-01, 1.01063e-01, 7.48956e-02, 5.59879e-02), (0.4440, 0.4323, 0.4198)),
    _t12("2", "fbn", (0.5, 0.6), (-1, -0.5),
         (2.60892e-02, 7.38107e-03, 1.94354e-03, 4.97443e-04), (1.8216, 1.9251, 1.9661),
         (1.50666e-01, 9.67924e-02, 6.02306e-02, 3.68350e-02), (0.6384, 0.6844, 0.7094)),
    _t12("2", "fbn", (0.5, 0.6), (-1, 0.5),
         (2.59362e-02, 7.33675e-03, 1.93191e-03, 4.94466e-04), (1.8218, 1.9251, 1.9661),
         (1.49124e-01, 9.59574e-02, 5.98127e-02, 3.66474e-02), (0.6360, 0.6819, 0.7067)),
    _t12("2", "fbn", (0.5, 0.6), (-1, 1),
         (2.60129e-02, 7.36178e-03, 1.93842e-03, 4.96117e-04), (1.8211, 1.9252, 1.9661),
         (1.51346e-01, 9.72006e-02, 6.04715e-02, 3.69737e-02), (0.6388, 0.6847, 0.7098)),
    _t12("2", "fbn", (0.7, 0.3), (0.5, -0.5),
         (3.35206e-03, 9.27758e-04, 2.40945e-04, 6.09667e-05), (1.8532, 1.9450, 1.9826),
         (1.15488e-01, 9.86337e-02, 8.65064e-02, 7.74200e-02), (0.2276, 0.1893, 0.1601)),
    _t12("2", "fbn", (0.7, 0.3), (0.5, 0.5),
         (3.35206e-03, 8.32158e-04, 2.16430e-04, 5.47603e-05), (2.0101, 1.9430, 1.9827),
         (1.20715e-01, 1.03273e-01, 9.05080e-02, 8.07243e-02), (0.2251, 0.1903, 0.1650)),
    _t12("2", "fbn", (0.7, 0.3), (0.5, 1),
         (3.35206e-03, 9.07059e-04, 2.35530e-04, 5.95824e-05), (1.8858, 1.9453, 1.9830),
         (1.15318e-01, 9.84819e-02, 8.63751e-02, 7.73112e-02), (0.2277, 0.1892, 0.1599)),
]


def _t34(table, family, gk, th, ec, rc):
    return TableBlock(
        table, E1, family, gk[0], gk[1], th[0], th[1], "h", (1000,), (10, 20, 40, 80),
        {"corrected": ColumnRef("E_c", ec, rc)},
    )


_TABLE3 = [
    _t34("3", "fbt", (0.6, 0.2), (0, 0),
         (9.73080e-02, 2.44415e-02, 6.11715e-03, 1.52933e-03), (1.9932, 1.9984, 2.0000)),
    _t34("3", "fbt", (0.6, 0.2), (0, 0.4),
         (9.73080e-02, 2.44415e-02, 6.11717e-03, 1.52934e-03), (1.9932, 1.9984, 2.0000)),
    _t34("3", "fbt", (0.6, 0.2), (-1, 0.2),
         (9.73073e-02, 2.44408e-02, 6.11644e-03, 1.52861e-03), (1.9933, 1.9985, 2.0005)),
]

_TABLE4 = [
    _t34("4", "fbn", (0.3, 0.9), (0, 0),
         (9.67827e-02, 2.43091e-02, 6.08376e-03, 1.52072e-03), (1.9933, 1.9985, 2.0002)),
    _t34("4", "fbn", (0.3, 0.9), (1, 0.5),
         (9.67819e-02, 2.43082e-02, 6.08286e-03, 1.51982e-03), (1.9933, 1.9986, 2.0008)),
    _t34("4", "fbn", (0.3, 0.9), (-0.5, -1),
         (9.67816e-02, 2.43079e-02, 6.08257e-03, 1.51953e-03), (1.9933, 1.9987, 2.0011)),
]


def _tml(table, family, th, ec, rc, eo, ro):
    # mu = 0, so kappa and theta_kappa do not enter; they mirror gamma and theta
    return TableBlock(
        table, ML, family, 0.8, 0.8, th, th, "tau", (20, 40, 80, 160), (5000,),
        {"corrected": ColumnRef("E_c", ec, rc), "baseline": ColumnRef("E_o", eo, ro)},
    )


_ML_THETA0 = (
    (1.86654e-04, 5.47490e-05, 1.50683e-05, 3.98128e-06), (1.7695, 1.8613, 1.9202),
    (2.64217e-02, 1.51117e-02, 8.62130e-03, 4.92431e-03), (0.8061, 0.8097, 0.8080),
)

_TABLE41 = [
    _tml("4.1", "fbt", 0, *_ML_THETA0),
    _tml("4.1", "fbt", 0.49,
         (2.24628e-04, 6.55487e-05, 1.79678e-05, 4.73584e-06), (1.7769, 1.8672, 1.9237),
         (2.68005e-02, 1.52410e-02, 8.66757e-03, 4.94031e-03), (0.8143, 0.8143, 0.8110)),
    _tml("4.1", "fbt", -0.5,
         (1.48292e-04, 4.36901e-05, 1.20943e-05, 3.20788e-06), (1.7631, 1.8530, 1.9146),
         (2.61591e-02, 1.50155e-02, 8.58756e-03, 4.91277e-03), (0.8009, 0.8061, 0.8057)),
]

_TABLE42 = [
    _tml("4.2", "fbn", 0, *_ML_THETA0),
    _tml("4.2", "fbn", 0.5,
         (2.02209e-04, 5.91842e-05, 1.62578e-05, 4.29027e-06), (1.7726, 1.8641, 1.9220),
         (2.65577e-02, 1.51619e-02, 8.63900e-03, 4.93038e-03), (0.8087, 0.8115, 0.8092)),
    _tml("4.2", "fbn", 1,
         (1.71142e-04, 5.03715e-05, 1.38928e-05, 3.67493e-06), (1.7645, 1.8583, 1.9185),
         (2.62564e-02, 1.50475e-02, 8.59807e-03, 4.91622e-03), (0.8031, 0.8074, 0.8065)),
]


def _t56(table, family, gk, th, e, r):
    return TableBlock(
        table, E2, family, gk[0], gk[1], th[0], th[1], "tau", _TAU3, (400,),
        {"off": ColumnRef("E_o", e, r)}, desk_n_cells=(100,),
    )


_TABLE5 = [
    _t56("5", "fbt", (0.8, 0.9), (0, 0), (5.80147e-03, 1.47696e-03, 3.47434e-04), (1.97, 2.09)),
    _t56("5", "fbt", (0.8, 0.9), (0, 0.49), (5.77837e-03, 1.47083e-03, 3.45859e-04), (1.97, 2.09)),
    _t56("5", "fbt", (0.8, 0.9), (-0.5, 0), (9.30248e-03, 2.46264e-03, 6.07297e-04), (1.92, 2.02)),
    _t56("5", "fbt", (0.7, 0.3), (0.4, -0.1), (4.10911e-03, 1.01088e-03, 2.26175e-04), (2.02, 2.16)),
    _t56("5", "fbt", (0.7, 0.3), (0.3, -1.5), (5.79435e-03, 1.46303e-03, 3.42361e-04), (1.99, 2.10)),
    _t56("5", "fbt", (0.7, 0.3), (-1, 0), (1.85514e-02, 5.10485e-03, 1.30957e-03), (1.86, 1.96)),
]

_TABLE6 = [
    _t56("6", "fbn", (0.2, 0.8), (0, 0), (2.21254e-02, 5.72476e-03, 1.43163e-03), (1.95, 2.00)),
    _t56("6", "fbn", (0.2, 0.8), (0, 0.5), (2.21130e-02, 5.72128e-03, 1.43071e-03), (1.95, 2.00)),
    _t56("6", "fbn", (0.2, 0.8), (0, 1), (2.21403e-02, 5.72857e-03, 1.43259e-03), (1.95, 2.00)),
    _t56("6", "fbn", (0.5, 0.6), (-1, -0.5), (5.91366e-02, 1.61172e-02, 4.17263e-03), (1.88, 1.95)),
    _t56("6", "fbn", (0.5, 0.6), (-1, 0.5), (5.89600e-02, 1.60688e-02, 4.15997e-03), (1.88, 1.95)),
    _t56("6", "fbn", (0.5, 0.6), (-1, 1), (5.90674e-02, 1.60965e-02, 4.16706e-03), (1.88, 1.95)),
]


def _t78(table, family, gk, th, e, r):
    return TableBlock(
        table, E2, family, gk[0], gk[1], th[0], th[1], "h", (200,), (10, 20, 40),
        {"off": ColumnRef("E_o", e, r)},
    )


_TABLE7 = [
    _t78("7", "fbt", (0.8, 0.4), (0, 0), (7.58676e-02, 1.89074e-02, 4.71383e-03), (2.01, 2.00)),
    _t78("7", "fbt", (0.8, 0.4), (0.1, 0.45), (7.58695e-02, 1.89095e-02, 4.71597e-03), (2.00, 2.00)),
    _t78("7", "fbt", (0.8, 0.4), (-1, -2), (7.58493e-02, 1.88881e-02, 4.69437e-03), (2.01, 2.01)),
]

_TABLE8 = [
    _t78("8", "fbn", (0.4, 0.3), (0, 0), (7.54590e-02, 1.87869e-02, 4.66558e-03), (2.01, 2.01)),
    _t78("8", "fbn", (0.4, 0.3), (0.5, 0.5), (7.54639e-02, 1.87923e-02, 4.67102e-03), (2.01, 2.01)),
    _t78("8", "fbn", (0.4, 0.3), (-0.8, 1), (7.53721e-02, 1.86908e-02, 4.56767e-03), (2.01, 2.03)),
]

TABLES = {
    "1": _TABLE1,
    "2": _TABLE2,
    "3": _TABLE3,
    "4": _TABLE4,
    "4.1": _TABLE41,
    "4.2": _TABLE42,
    "5": _TABLE5,
    "6": _TABLE6,
    "7": _TABLE7,
    "8": _TABLE8,
}
TABLE_IDS = tuple(TABLES)


def table_blocks(table_id: str):
    try:
        return TABLES[str(table_id)]
    except KeyError:
        raise KeyError(f"unknown table {table_id!r}; choose from {', '.join(TABLE_IDS)}") from None
