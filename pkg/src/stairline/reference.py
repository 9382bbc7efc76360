"""Published optima used as regression anchors.

Grid rows map a type label to ``(q, p, value)`` with the coordinates as
printed (six significant digits).  Diagonal rows are exact.
"""
from fractions import Fraction as F

GRID_D3 = {
    "{}": ((1, 1, F(4, 5)), (F(1, 2), F(1, 2), 0), F(1, 25)),
    "{2}": ((F(2, 3), 0, F(4, 5)), (F(1, 3), F(3, 4), 0), F(1, 25)),
}

# facet maxima for type {} in d = 3, free order (p1, p2, q2, q3)
GRID_D3_FACETS = [
    ("q2=1", {"q2": 1, "q3": F(4, 5), "p1": F(1, 2), "p2": F(1, 2)}, F(1, 25)),
    ("q2=p2", {"q3": F(64, 81), "p1": F(10, 37), "p2": F(37, 64), "q2": F(37, 64)}, F(1, 27)),
    ("p2=0", {"q3": F(2, 3), "p1": F(1, 3), "q2": F(3, 4), "p2": 0}, F(1, 27)),
    ("p1=1", {"q3": F(1, 2), "q2": F(3, 4), "p2": F(1, 4), "p1": 1}, 0),
    ("p1=0", {"q3": F(2, 3), "q2": F(1, 2), "p2": F(1, 4), "p1": 0}, F(1, 27)),
    ("q3=1", {"p1": F(1, 2), "q2": F(27, 32), "p2": F(2, 3), "q3": 1}, F(1, 27)),
    ("q3=0", {"p1": F(1, 2), "q2": F(3, 4), "p2": F(1, 4), "q3": 0}, 0),
]

GRID_D4 = {
    "{}": ((1, 0.99973, 0.841676, 0.824961), (0.499854, 0.57138, 0.590885, 0), 0.00456416),
    "{2}": ((0.70017, 0, 0.841749, 0.824908), (0.400339, 0.714113, 0.590808, 0), 0.00456416),
    "{3}": ((0.666089, 0.777112, 0, 0.827549), (0.395765, 0.49188, 0.794824, 0), 0.00457936),
    "{2,3}": ((0.604237, 0.491879, 0, 0.830208), (0.333913, 0.77711, 0.792279, 0), 0.00457936),
}

GRID_D4_HIGH_PRECISION = "0.004579364805943860006"

GRID_D5 = {
    "{}": ((1, 0.999998, 0.863413, 0.850444, 0.848693),
           (0.499999, 0.604701, 0.650764, 0.657374, 0), 0.000402464),
    "{2}": ((0.71664, 0, 0.863421, 0.850413, 0.848695),
            (0.433377, 0.697668, 0.650744, 0.657406, 0), 0.000402464),
    "{3}": ((0.675465, 0.796913, 0, 0.850715, 0.848819),
            (0.428888, 0.554061, 0.78136, 0.657527, 0), 0.00040419),
    "{4}": ((0.661946, 0.786912, 0.815446, 0, 0.850046),
            (0.425712, 0.554894, 0.590175, 0.827888, 0), 0.000404818),
    "{2,3,4}": ((0.574368, 0.554597, 0.589951, 0, 0.853691),
                (0.337538, 0.786894, 0.815268, 0.824237, 0), 0.000404818),
    "{2,3}": ((0.630424, 0.478229, 0, 0.852643, 0.849618),
              (0.387534, 0.738946, 0.779659, 0.658423, 0), 0.000404815),
    "{2,4}": ((0.622544, 0.495106, 0.817108, 0, 0.850792),
              (0.388108, 0.740553, 0.590829, 0.826241, 0), 0.000405335),
    "{3,4}": ((0.612094, 0.740651, 0.590451, 0, 0.852007),
              (0.377364, 0.494832, 0.816924, 0.824642, 0), 0.000405335),
}

GRID_D6_BEST = 0.0000291323
GRID_D6_BEST_TYPES = ("{2,3,5}", "{4,5}")
GRID_D6 = {
    "{2,3,5}": ((0.592993, 0.545248, 0.59284, 0.843717, 0, 0.869422),
                (0.38511, 0.750149, 0.798446, 0.658605, 0.849763, 0), GRID_D6_BEST),
}

GRID_BEST = {3: F(1, 25), 4: 0.00457936, 5: 0.000405335, 6: GRID_D6_BEST}
GRID_TABLES = {3: GRID_D3, 4: GRID_D4, 5: GRID_D5, 6: GRID_D6}

# diagonal, d = 3: objective id -> (q, p, maximum)
DIAG3 = {
    1: ((1, F(3, 5), F(4, 5)), (F(1, 5), F(2, 5), 0), F(1, 25)),
    2: ((1, F(59, 64), F(27, 32)), (F(1, 3), F(49, 96), 0), F(1, 27)),
    3: ((1, F(27, 32), F(2, 3)), (F(1, 3), F(5, 32), 0), F(1, 27)),
    4: ((1, F(1, 2), F(2, 3)), (F(1, 6), F(5, 64), 0), F(1, 27)),
    5: ((0, F(11, 16), F(27, 32)), (F(1, 3), F(49, 96), 0), F(1, 27)),
    6: ((0, F(59, 64), F(27, 32)), (F(1, 3), F(49, 96), 0), F(1, 27)),
    7: ((0, F(27, 32), F(2, 3)), (F(1, 3), F(5, 32), 0), F(1, 27)),
    8: ((0, F(1, 2), F(2, 3)), (F(1, 3), F(5, 32), 0), F(1, 27)),
    9: ((0, F(1, 3), F(2, 3)), (F(11, 16), F(5, 32), 0), F(1, 27)),
    10: ((F(2, 5), 0, F(4, 5)), (F(1, 5), F(3, 5), 0), F(1, 25)),
    11: ((F(11, 16), 0, F(3, 4)), (F(1, 12), F(5, 12), 0), F(1, 27)),
    12: ((F(1, 3), 0, F(2, 3)), (F(5, 32), F(27, 32), 0), F(1, 27)),
    13: ((F(1, 5), 0, F(4, 5)), (F(2, 5), F(3, 5), 0), F(1, 25)),
    14: ((F(5, 32), 0, F(2, 3)), (F(3, 4), F(47, 96), 0), F(1, 27)),
    15: ((F(1, 3), 0, F(2, 3)), (F(11, 16), F(27, 32), 0), F(1, 27)),
}
DIAG3_BEST = F(1, 25)
DIAG3_BEST_IDS = (1, 10, 13)

# exhaustive census on the d = 2, m = 3 stretched grid for a crossing
# segment given in unit-cube coordinates: (stabbed, total)
CENSUS_D2_SEGMENT = ((F(1, 5), F(9, 10)), (F(4, 5), F(1, 10)))
CENSUS_GOLDEN = {(2, 3): (20, 36)}
