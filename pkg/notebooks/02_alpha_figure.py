# %% [markdown]
# # The response constant alpha across exponents
#
# alpha(N, p) is the radial integral of U * S where S solves the linearized
# problem with source |x|^2 U. Its sign at the mass-critical exponent
# p = 1 + 4/N decides which side of the threshold mass the solutions live on.

# %%
import numpy as np

from nlsnorm import compute_alpha, sweep_alpha

for N in range(1, 9):
    p = 1 + 4 / N
    print(f"N={N}  p={p:.4f}  alpha={compute_alpha(N, p).alpha_radial:.6g}")

# %% [markdown]
# A coarse sweep for N = 3. alpha changes sign near p = 1 + 4/(N+2) and
# drops toward zero as p approaches the Sobolev exponent.

# %%
pts = sweep_alpha(3, 1.35, 4.95, 13)
for pt in pts:
    print(f"{pt.p:6.3f}  {getattr(pt, 'alpha_radial', float('nan')):+.6f}")

# %% [markdown]
# Full data files for all dimensions come from
# `nlsnorm reproduce-figure --out-dir figure/`.
