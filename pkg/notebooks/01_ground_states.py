# %% [markdown]
# # Radial ground states
#
# Shoot the positive decaying solution of -U'' - (N-1)/r U' + U = U^p and
# compare against the one-dimensional sech profile.

# %%
import numpy as np

from nlsnorm import shoot_ground_state

gs = shoot_ground_state(1, 3.0)
r = gs.r[gs.r <= 10]
sech = np.sqrt(2.0) / np.cosh(r)
print("u0 =", gs.u0, " gamma =", gs.gamma, " gamma~ =", gs.gamma_tilde)
print("max |U - sqrt(2) sech| on [0, 10]:", np.max(np.abs(gs.U[: r.size] - sech)))

# %% [markdown]
# The planar cubic case is the one used by the synchronized examples.

# %%
gs2 = shoot_ground_state(2, 3.0)
print("N=2, p=3: u0 = %.10f  gamma = %.10f" % (gs2.u0, gs2.gamma))
print("decay radius at 1e-10:", gs2.decay_radius(1e-10))

# %%
for N, p in [(3, 2.0), (4, 2.0), (5, 1.8)]:
    g = shoot_ground_state(N, p)
    print(f"N={N} p={p}: u0={g.u0:.8f} gamma={g.gamma:.8f}")
