# %% [markdown]
# # Mass asymptotics in the planar cubic case
#
# Build the averaged potential Gamma from trapping potentials, locate its
# critical point, and evaluate the constants entering the expansion of the
# mass near the threshold mu0 = gamma * sum(sigma^2).

# %%
import numpy as np

from nlsnorm import (CouplingMatrix, PotentialModel, build_global_potential, compute_alpha,
                     compute_upsilon, find_critical_point, predict_critical,
                     predict_tau_critical, shoot_ground_state, solve_sigma)
from nlsnorm.concentration import mass_threshold

gs = shoot_ground_state(2, 3.0)
sync = solve_sigma(CouplingMatrix.two_by_two(1.0, 2.0, 3.0))
a = [[1.0, 1.0], [2.0, 1.0]]
model = PotentialModel.quadratic(a)
gp = build_global_potential(gs, sync, model)
cp = find_critical_point(gp, np.array([0.3, -0.2]))
print("xi0 =", cp.xi0, " nondegenerate:", cp.nondegenerate)

# %%
alpha = compute_alpha(2, 3.0, ground=gs).alpha_full
ups = compute_upsilon(gs, sync, a, alpha_full=alpha)
mu0 = mass_threshold(gs, sync.sigma)
print(f"mu0 = {mu0:.8f}  alpha = {alpha:.8f}  DeltaGamma = {ups.delta_gamma:.6f}")
print(f"Upsilon = {ups.upsilon:.6f}  (gap {ups.identity_gap:.1e})")

# %% [markdown]
# Since alpha * DeltaGamma > 0 the admissible masses lie below mu0.

# %%
for mu in mu0 * (1 - np.logspace(-2, -6, 5)):
    pred = predict_critical(mu, mu0, alpha, ups.delta_gamma)
    print(f"mu0 - mu = {mu0 - mu:.3e}  eps = {pred.epsilon:.4e}  lambda = {pred.lam:.4e}")
print(predict_critical(1.01 * mu0, mu0, alpha, ups.delta_gamma).reason)

# %% [markdown]
# With a cubic term the averaged potential is no longer even and the
# concentration point drifts at first order.

# %%
cubic = PotentialModel.polynomial(2, [[(1.0, (2, 0)), (1.0, (0, 2)), (1.0, (3, 0))],
                                      [(2.0, (2, 0)), (1.0, (0, 2))]])
print("tau =", predict_tau_critical(build_global_potential(gs, sync, cubic), gs))
