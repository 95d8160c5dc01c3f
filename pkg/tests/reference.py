"""Published reference values and frozen independent-oracle values."""
import numpy as np

# Table of ruin probabilities for exponential(3) plus Abate-Whitt(2) claims,
# eps = 0.001, load 0.5, at u = 0..10 (8 printed decimals).
RUIN_TABLE_U = np.arange(11.0)
RUIN_TABLE = {
    "exact": [0.50000000, 0.11211000, 0.02557910, 0.00621454, 0.00184042, 0.00082276,
              0.00056334, 0.00047969, 0.00043993, 0.00041336, 0.00039235],
    "discard": [0.49925037, 0.11114757, 0.02474466, 0.00550887, 0.00122643, 0.00027304,
                0.00006078, 0.00001353, 3.01e-6, 6.70e-7, 1.49e-7],
    "replace": [0.49975012, 0.11142576, 0.02484381, 0.00553925, 0.00123504, 0.00027536,
                0.00006139, 0.00001368, 3.05e-6, 6.80e-7, 1.51e-7],
    "corrected_discard": [0.50000000, 0.11210955, 0.02557847, 0.00621386, 0.00183975,
                          0.00082212, 0.00056273, 0.00047910, 0.00043937, 0.00041284,
                          0.00039183],
    "corrected_replace": [0.50000000, 0.11211017, 0.02557930, 0.00621466, 0.00184047,
                          0.00082275, 0.00056329, 0.00047962, 0.00043985, 0.00041329,
                          0.00039225],
}
RUIN_TABLE_TOL = 5e-7

# 99% VaR of the aggregate loss (lam = 1, eps = 0.01, exponential(1.5) and
# Lomax(1, 2) claims) at horizons 1, 5, 10, 15, 20.
VAR_TABLE_T = [1, 5, 10, 15, 20]
VAR_TABLE = {
    "simulation": [4.16, 9.77, 15.24, 20.27, 24.99],
    "discard": [4.09, 9.54, 14.89, 19.73, 23.76],
    "corrected_discard": [4.14, 9.74, 15.22, 20.17, 24.30],
}
VAR_TABLE_TOL = 0.02

# Ruin probability at u = 0.5, 1, 2, 5, 10 for mu = 2, nu = 3, keyed by
# (eps, load), from mpmath's Talbot inversion of the Pollaczek-Khinchine
# transform at 30 digits.
ORACLE_U = [0.5, 1.0, 2.0, 5.0, 10.0]
ORACLE_RUIN = {
    (0.001, 0.5): [0.236511943120355, 0.112110004499688, 0.0255791074165602,
                   0.000822764330455974, 0.000392353336071856],
    (0.1, 0.5): [0.266680747940099, 0.161182324839413, 0.0862180743459955,
                 0.0497703990327883, 0.036359188180061],
    (0.1, 0.7): [0.478712082427116, 0.347850953716567, 0.217695074262744,
                 0.119444905246563, 0.085122933733007],
    (0.1, 0.9): [0.792252181628159, 0.708840446252421, 0.589722068866401,
                 0.413888399988241, 0.305995263269176],
}

# Corrected-discard aggregate tails for the value-at-risk model from an
# independent Poisson-gamma series with scipy quadrature, keyed by (t, x).
AGG_FIXED = {
    (1, 2): 0.09426168436420855,
    (1, 5): 0.004107862305608724,
    (10, 15): 0.011292299818835505,
    (10, 5): 0.6840528280048189,
    (20, 25): 0.009631425245990727,
}
# Same model with an exponential horizon of mean 10, keyed by x.
AGG_EXP_HORIZON = {5.0: 0.4602704035265247, 15.0: 0.11841949420905111}
