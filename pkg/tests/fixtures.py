"""Frozen reference values.

Figure readings: marked points of the figure of p -> ∫ U S r^(N-1) dr.
ORACLE: values produced by the independent computations in oracles.py
(collocation BVP, dense finite volumes) at fine resolution, then frozen.
"""

import math

# (N, p) -> alpha_radial, checked at 0.5 % relative
FIGURE_ALPHA = {
    (1, 5.0): 0.41922325133441757,
    (2, 3.0): 1.1047799217791177,
    (3, 7.0 / 3.0): 4.403048042874518,
    (4, 2.0): 23.516225342983404,
}
FIGURE_ALPHA_TOL = 5e-3

# N = 5..8 read through the scaled axes of the small panels, 2 %
SCALED_AXIS_ALPHA = {
    (5, 1.8): 157.5,
    (6, 5.0 / 3.0): 1269.9,
    (7, 11.0 / 7.0): 11964.6,
    (8, 1.5): 129026.5,
}
SCALED_AXIS_TOL = 2e-2

# collocation oracle (scipy solve_bvp, tol 1e-10, R = 30)
ORACLE_U0_N2 = 2.2062008646
ORACLE_GAMMA_N2 = 11.70089652
ORACLE_ALPHA_RADIAL_N2 = 1.1057179565057

# dense finite-volume oracle, Richardson-extrapolated
ORACLE_LAMBDA_RADIAL_2 = 5.0877264
ORACLE_LAMBDA_RADIAL_3 = 12.09896
ORACLE_LAMBDA_SECTOR1_2 = 8.674113

GAMMA_TILDE_N1 = math.pi ** 2 / 3
