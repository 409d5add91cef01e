# %% [markdown]
# # Synchronized states and the non-degeneracy test
#
# For a coupling matrix B the synchronized state has components sigma_i U
# with B sigma^2 = 1. The linearized system splits along the eigenvectors
# of M = I + 2 B o sigma sigma^T.

# %%
import numpy as np

from nlsnorm import CouplingMatrix, SpectrumPolicy, check_nondegeneracy, solve_sigma
from nlsnorm.synchronized import example1_closed_form, example2_matrix

B = CouplingMatrix.two_by_two(1.0, 2.0, 3.0)
s = solve_sigma(B)
print("sigma^2 =", s.sigma ** 2, " Lambda =", s.lambdas)
print(example1_closed_form(1.0, 2.0, 3.0))
print(check_nondegeneracy(B).verdict)

# %% [markdown]
# Inside the window between the self couplings no positive state exists.

# %%
print(solve_sigma(CouplingMatrix.two_by_two(1.0, 2.0, 1.5)))

# %% [markdown]
# Negative coupling leaves the Perron-Frobenius fast path; the weighted
# spectrum is then computed and every Lambda_i is compared with it.

# %%
rep = check_nondegeneracy(CouplingMatrix.two_by_two(1.0, 2.0, -0.5), SpectrumPolicy(mode="compute"))
print(rep.verdict, rep.path, np.round(rep.margins, 4))

# %%
s3 = solve_sigma(example2_matrix([1.0, 2.0, 3.0], 10.0))
print("three components:", s3.sigma, check_nondegeneracy(example2_matrix([1.0, 2.0, 3.0], 10.0)).verdict)
