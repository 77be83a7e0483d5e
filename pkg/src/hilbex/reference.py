"""Published reference figures for the fifteen synthetic spaces.

Used to resolve threshold labels such as ``t1`` on the command line and as
targets by the reproduction tests.
"""

T_LABELS = ("t1", "t2", "t4", "t8", "t16", "t32")
T_TARGETS = {"t1": 1, "t2": 2, "t4": 4, "t8": 8, "t16": 16, "t32": 32}

SPACES = tuple(f"{m}_{d}" for m in ("euc", "jsd", "tri") for d in (6, 8, 10, 12, 14))

# space -> (idim, t1, t2, t4, t8, t16, t32)
PROFILES = {
    "euc_6": (7.698, 0.076, 0.085, 0.095, 0.107, 0.120, 0.135),
    "euc_8": (10.40, 0.149, 0.162, 0.177, 0.193, 0.211, 0.230),
    "euc_10": (13.36, 0.228, 0.245, 0.262, 0.281, 0.301, 0.323),
    "euc_12": (16.23, 0.308, 0.327, 0.346, 0.367, 0.388, 0.412),
    "euc_14": (19.13, 0.386, 0.406, 0.426, 0.448, 0.471, 0.495),
    "jsd_6": (5.162, 0.022, 0.026, 0.030, 0.035, 0.040, 0.046),
    "jsd_8": (7.273, 0.045, 0.051, 0.057, 0.064, 0.071, 0.078),
    "jsd_10": (9.486, 0.067, 0.073, 0.079, 0.086, 0.094, 0.102),
    "jsd_12": (11.51, 0.084, 0.091, 0.099, 0.107, 0.114, 0.122),
    "jsd_14": (13.69, 0.103, 0.111, 0.118, 0.126, 0.133, 0.141),
    "tri_6": (5.754, 0.025, 0.030, 0.035, 0.041, 0.047, 0.055),
    "tri_8": (8.181, 0.053, 0.060, 0.068, 0.075, 0.083, 0.091),
    "tri_10": (10.46, 0.078, 0.086, 0.093, 0.101, 0.110, 0.119),
    "tri_12": (13.02, 0.098, 0.106, 0.116, 0.125, 0.133, 0.142),
    "tri_14": (15.60, 0.120, 0.129, 0.137, 0.146, 0.155, 0.164),
}

# space -> {column: (t1, t4, t16)} exclusion percentages
POWER = {
    "euc_6": {"hyperbolic": (59.8, 50.8, 40.7), "hilbert": (80.5, 75.6, 69.4), "pivot": (74.4, 68.1, 60.4)},
    "euc_8": {"hyperbolic": (31.4, 23.3, 15.8), "hilbert": (62.1, 55.6, 48.3), "pivot": (51.8, 44.2, 36.0)},
    "euc_10": {"hyperbolic": (12.2, 7.6, 4.3), "hilbert": (44.3, 37.7, 30.8), "pivot": (31.9, 25.1, 18.7)},
    "euc_12": {"hyperbolic": (3.8, 2.0, 0.9), "hilbert": (29.5, 23.8, 18.4), "pivot": (17.4, 12.7, 8.6)},
    "euc_14": {"hyperbolic": (0.9, 0.4, 0.2), "hilbert": (18.5, 14.2, 10.3), "pivot": (8.8, 6.0, 3.8)},
    "jsd_6": {"hyperbolic": (66.1, 54.9, 42.9), "hilbert": (83.8, 77.8, 70.7), "pivot": (82.4, 75.8, 68.0)},
    "jsd_8": {"hyperbolic": (32.4, 21.7, 13.5), "hilbert": (62.8, 53.9, 45.2), "pivot": (58.5, 48.8, 39.3)},
    "jsd_10": {"hyperbolic": (11.4, 6.3, 3.0), "hilbert": (42.6, 34.4, 26.4), "pivot": (36.2, 27.7, 19.8)},
    "jsd_12": {"hyperbolic": (3.5, 1.4, 0.5), "hilbert": (27.4, 19.6, 13.5), "pivot": (20.8, 13.6, 8.5)},
    "jsd_14": {"hyperbolic": (0.6, 0.2, 0.1), "hilbert": (14.4, 9.5, 6.0), "pivot": (9.3, 5.4, 3.0)},
    "tri_6": {"hyperbolic": (63.7, 51.9, 39.7), "hilbert": (82.3, 75.8, 68.2), "pivot": (80.4, 73.1, 64.6)},
    "tri_8": {"hyperbolic": (27.9, 17.6, 10.3), "hilbert": (59.5, 50.1, 41.0), "pivot": (54.2, 43.9, 34.2)},
    "tri_10": {"hyperbolic": (8.1, 4.1, 1.8), "hilbert": (38.0, 29.7, 21.8), "pivot": (31.0, 22.8, 15.4)},
    "tri_12": {"hyperbolic": (1.9, 0.6, 0.2), "hilbert": (22.7, 15.3, 9.9), "pivot": (16.2, 9.8, 5.7)},
    "tri_14": {"hyperbolic": (0.3, 0.1, 0.0), "hilbert": (10.8, 6.6, 3.8), "pivot": (6.2, 3.3, 1.6)},
}
POWER_LABELS = ("t1", "t4", "t16")

# (space, tree, strategy) -> mean distance calls as % of n, at (t1, t4, t16), n = 10**6
COST = {
    ("euc_6", "ght", "hyperbolic"): (0.06, 0.11, 0.20), ("euc_6", "mht", "hyperbolic"): (0.05, 0.08, 0.15),
    ("euc_6", "ght", "hilbert"): (0.05, 0.08, 0.14), ("euc_6", "mht", "hilbert"): (0.03, 0.05, 0.10),
    ("euc_8", "ght", "hyperbolic"): (0.30, 0.50, 0.84), ("euc_8", "mht", "hyperbolic"): (0.25, 0.41, 0.68),
    ("euc_8", "ght", "hilbert"): (0.18, 0.31, 0.55), ("euc_8", "mht", "hilbert"): (0.13, 0.22, 0.40),
    ("euc_10", "ght", "hyperbolic"): (1.19, 1.86, 2.91), ("euc_10", "mht", "hyperbolic"): (1.00, 1.54, 2.33),
    ("euc_10", "ght", "hilbert"): (0.68, 1.12, 1.87), ("euc_10", "mht", "hilbert"): (0.48, 0.80, 1.35),
    ("euc_12", "ght", "hyperbolic"): (3.87, 5.60, 7.97), ("euc_12", "mht", "hyperbolic"): (3.19, 4.48, 6.25),
    ("euc_12", "ght", "hilbert"): (2.25, 3.53, 5.48), ("euc_12", "mht", "hilbert"): (1.62, 2.54, 3.97),
    ("euc_14", "ght", "hyperbolic"): (9.92, 13.18, 17.26), ("euc_14", "mht", "hyperbolic"): (7.67, 10.06, 13.17),
    ("euc_14", "ght", "hilbert"): (6.25, 9.09, 13.02), ("euc_14", "mht", "hilbert"): (4.47, 6.57, 9.53),
    ("tri_6", "ght", "hyperbolic"): (0.05, 0.11, 0.21), ("tri_6", "mht", "hyperbolic"): (0.04, 0.08, 0.16),
    ("tri_6", "ght", "hilbert"): (0.04, 0.07, 0.15), ("tri_6", "mht", "hilbert"): (0.02, 0.05, 0.11),
    ("tri_8", "ght", "hyperbolic"): (0.40, 0.78, 1.41), ("tri_8", "mht", "hyperbolic"): (0.32, 0.62, 1.10),
    ("tri_8", "ght", "hilbert"): (0.23, 0.48, 0.92), ("tri_8", "mht", "hilbert"): (0.17, 0.35, 0.69),
    ("tri_10", "ght", "hyperbolic"): (1.95, 3.29, 5.37), ("tri_10", "mht", "hyperbolic"): (1.66, 2.73, 4.36),
    ("tri_10", "ght", "hilbert"): (1.11, 2.05, 3.71), ("tri_10", "mht", "hilbert"): (0.84, 1.57, 2.87),
    ("tri_12", "ght", "hyperbolic"): (6.10, 9.84, 14.49), ("tri_12", "mht", "hyperbolic"): (5.25, 8.24, 12.04),
    ("tri_12", "ght", "hilbert"): (3.74, 6.86, 11.27), ("tri_12", "mht", "hilbert"): (2.92, 5.43, 9.04),
    ("tri_14", "ght", "hyperbolic"): (16.63, 23.11, 30.57), ("tri_14", "mht", "hyperbolic"): (13.95, 19.45, 26.06),
    ("tri_14", "ght", "hilbert"): (12.02, 18.57, 26.52), ("tri_14", "mht", "hilbert"): (9.68, 15.24, 22.25),
    ("jsd_6", "ght", "hyperbolic"): (0.05, 0.10, 0.20), ("jsd_6", "mht", "hyperbolic"): (0.04, 0.08, 0.15),
    ("jsd_6", "ght", "hilbert"): (0.04, 0.07, 0.15), ("jsd_6", "mht", "hilbert"): (0.02, 0.05, 0.11),
    ("jsd_8", "ght", "hyperbolic"): (0.32, 0.63, 1.15), ("jsd_8", "mht", "hyperbolic"): (0.26, 0.51, 0.92),
    ("jsd_8", "ght", "hilbert"): (0.20, 0.40, 0.78), ("jsd_8", "mht", "hilbert"): (0.14, 0.29, 0.58),
    ("jsd_10", "ght", "hyperbolic"): (1.50, 2.58, 4.29), ("jsd_10", "mht", "hyperbolic"): (1.35, 2.22, 3.61),
    ("jsd_10", "ght", "hilbert"): (0.90, 1.64, 2.99), ("jsd_10", "mht", "hilbert"): (0.68, 1.25, 2.31),
    ("jsd_12", "ght", "hyperbolic"): (4.67, 7.68, 11.47), ("jsd_12", "mht", "hyperbolic"): (4.17, 6.62, 9.76),
    ("jsd_12", "ght", "hilbert"): (2.84, 5.27, 8.71), ("jsd_12", "mht", "hilbert"): (2.22, 4.15, 6.97),
    ("jsd_14", "ght", "hyperbolic"): (12.4, 17.67, 23.9), ("jsd_14", "mht", "hyperbolic"): (10.77, 15.17, 20.57),
    ("jsd_14", "ght", "hilbert"): (8.62, 13.62, 19.97), ("jsd_14", "mht", "hilbert"): (6.94, 11.13, 16.69),
}


def threshold(space: str, label: str) -> float:
    """Published threshold for ``space`` at ``label`` (t1 ... t32)."""
    return PROFILES[space][1 + T_LABELS.index(label)]


def idim(space: str) -> float:
    return PROFILES[space][0]
