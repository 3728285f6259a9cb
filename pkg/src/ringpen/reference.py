"""
Published reference values for the seven benchmark tables.

Keys are ``(m, n)``.  Values are stored exactly as printed, so the
number of decimals of each entry defines the rounding used in
comparisons (see :func:`last_digit_unit`).
"""

from __future__ import annotations

from decimal import Decimal

ROWS = ((20, 10), (50, 10), (100, 10), (100, 20), (100, 50))
CHECKPOINTS_EX1 = (10, 20, 30)
CHECKPOINTS_FW = (0, 60, 100, 200)

# GPM, Example 1: kt to reach dp <= 1e-4, then (dp, ds) at kt = 10, 20, 30.
TABLE1 = {
    (20, 10): (32, ("0.81", "5.97"), ("0.01", "0.09"), ("0.0002", "0.0014")),
    (50, 10): (33, ("1.28", "15.39"), ("0.02", "0.23"), ("0.0003", "0.0035")),
    (100, 10): (34, ("1.81", "31.11"), ("0.03", "0.47"), ("0.0004", "0.007")),
    (100, 20): (32, ("1.77", "82.37"), ("0.02", "0.81"), ("0.0002", "0.0018")),
    (100, 50): (31, ("2.21", "334.42"), ("0.02", "2.9"), ("0.0001", "0.0214")),
}

# SQP, Example 1: kt to reach dp <= 1e-4, then ds at kt = 10, 20, 30.
TABLE2 = {
    (20, 10): (40, ("3.26", "0.01", "0.0001")),
    (50, 10): (100, ("8.41", "0.03", "0.0001")),
    (100, 10): (200, ("17", "0.06", "0.0002")),
    (100, 20): (200, ("37.58", "0.07", "0.0003")),
    (100, 50): (200, ("159.14", "0.21", "0.0003")),
}

# ADM, Example 1: (kt, kl) for dp <= 1e-4 and (kt, kl, ds) for ds <= 1e-4.
TABLE3 = {
    (20, 10): ((287, 7), (144, 3, 0.0)),
    (50, 10): ((707, 7), (354, 3, 0.0)),
    (100, 10): ((1407, 7), (704, 3, 0.0)),
    (100, 20): ((1407, 7), (704, 3, 0.0)),
    (100, 50): ((1407, 7), (704, 3, 0.0)),
}

# GPM, Example 2: kt for dd <= 0.1; kt for dd <= 0.01 and dp there; (kt, ds).
TABLE4 = {
    (20, 10): (108, 597, "6.46", (580, "12.25")),
    (50, 10): (93, 897, "6.31", (880, "12.07")),
    (100, 10): (125, 836, "6.34", (820, "8.98")),
    (100, 20): (220, 2176, "4.14", (2160, "10.03")),
    (100, 50): (280, 5038, "3.06", (5020, "192.67")),
}

# Example 2: SQP row and ADM rows as (kt, kl, dd, dp, ds).
TABLE5_SQP = {(20, 10): (1000, None, "0.37", "2.78", "12.09")}
TABLE5_ADM = {
    (20, 10): (1005, 24, "0.56", "8.82", "9.74"),
    (50, 10): (960, 10, "1.29", "11.14", "12.77"),
    (100, 10): (1910, 9, "1.3", "13.09", "9.8"),
    (100, 20): (4925, 24, "0.95", "10.72", "20.67"),
    (100, 50): (9950, 49, "1.07", "14.35", "25.44"),
}

# Example 3 (TABLE6) and Example 4 (TABLE7): phi(z) at kt = 0, 60, 100, 200.
TABLE6_DPM = {
    (20, 10): ("360.85", "155.82", "152.6", "152.36"),
    (50, 10): ("875.72", "388.64", "382.82", "382.28"),
    (100, 10): ("1747.73", "771.74", "760.17", "759.42"),
    (100, 20): ("2495.44", "1197.44", "1100.81", "1095.09"),
    (100, 50): ("3951.23", "2373.52", "1902.42", "1764.77"),
}
TABLE6_PDM = {
    (20, 10): ("360.85", "181.08", "155.14", "152.34"),
    (50, 10): ("875.72", "443.04", "388.33", "382.25"),
    (100, 10): ("1747.73", "880.19", "771.53", "759.41"),
    (100, 20): ("2495.44", "1492.05", "1193.02", "1096.12"),
    (100, 50): ("3951.23", "2871.7", "2343.01", "1816.31"),
}
TABLE7_DPM = {
    (20, 10): ("360.85", "156.1", "153", "152.59"),
    (50, 10): ("875.72", "388.64", "383.12", "382.36"),
    (100, 10): ("1747.73", "771.73", "760.44", "759.5"),
    (100, 20): ("2495.44", "1197.4", "1100.93", "1095.36"),
    (100, 50): ("3951.23", "2373.65", "1902.53", "1765.63"),
}
TABLE7_PDM = {
    (20, 10): ("360.85", "181.19", "155.18", "152.35"),
    (50, 10): ("875.72", "443", "388.32", "382.26"),
    (100, 10): ("1747.73", "880.14", "771.52", "759.41"),
    (100, 20): ("2495.44", "1492.06", "1193.03", "1096.12"),
    (100, 50): ("3951.23", "2871.7", "2343", "1816.3"),
}


def last_digit_unit(printed):
    """One unit in the last printed digit: ``"5.97" -> 0.01``, ``"17" -> 1``."""
    exp = Decimal(printed).as_tuple().exponent
    return float(Decimal(1).scaleb(exp))


def round_like(value, printed):
    """Round ``value`` to the number of decimals shown in ``printed``."""
    exp = Decimal(printed).as_tuple().exponent
    return round(float(value), max(-exp, 0))
