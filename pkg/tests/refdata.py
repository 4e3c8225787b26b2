"""Printed reference values at the N=20 configuration, x=1.

Entries are stored as (mantissa, exponent) exactly as printed, i.e. value =
mantissa * 10**exponent with a 4-digit mantissa in [0.1, 1).
"""

# k: (theta, exact, theta0_F3, thetaplus_G2)
REF_TABLE_LOW = {
    0: (-3.418, (.4454, -19), (.4324, -19), None),
    1: (-3.593, (.1255, -17), (.1133, -17), (.1334, -17)),
    2: (-3.785, (.1686, -16), (.1486, -16), (.1727, -16)),
    3: (-3.994, (.1425, -15), (.1298, -15), (.1415, -15)),
    4: (-4.216, (.8355, -15), (.8503, -15), (.8187, -15)),
    5: (-4.444, (.3522, -14), (.4459, -14), (.3501, -14)),
    6: (-4.660, (.1062, -13), (.1947, -13), (.1010, -13)),
    7: (-4.825, (.2196, -13), None, (.2073, -13)),
    8: (-4.838, (.2833, -13), None, (.2707, -13)),
    9: (-4.411, (.1826, -13), None, (.1648, -13)),
}

# k: (theta, exact, theta_G1, theta1_F4)
REF_TABLE_HIGH = {
    10: (-3.177, (.2389, -14), (.2297, -14), None),
    11: (-1.650, (.7266, -16), (.7400, -16), None),
    12: (-.2175, (.8578, -18), (.8635, -18), None),
    13: (1.115, (.4972, -20), (.5074, -20), None),
    14: (2.378, (.1599, -22), (.1646, -22), None),
    15: (3.591, (.3044, -25), (.3145, -25), None),
    16: (4.769, (.3540, -28), (.3740, -28), (.1467, -27)),
    17: (5.921, (.2519, -31), (.2650, -31), (.5326, -31)),
    18: (7.052, (.1063, -34), (.1143, -34), (.1449, -34)),
    19: (8.167, (.2422, -38), (.2422, -38), (.2630, -38)),
    20: (9.269, (.2284, -42), None, (.2386, -42)),
}

REF_C = 7.598
REF_Y0_AT_1 = 0.4998
REF_YSTAR_Z = 0.4811
REF_ARGMAX_K17 = 3.052


def value(entry):
    m, e = entry
    return m * 10.0 ** e


def half_unit(entry):
    """Half a unit in the last printed digit."""
    _, e = entry
    return 0.5e-4 * 10.0 ** e


def matches_printed(ours, entry):
    return abs(ours - value(entry)) <= half_unit(entry) * (1 + 1e-9)
