# %% [markdown]
# The multiplier functional G_k and a whole-space Poincare constant.

# %%
from dampwave import Bump, DampingProfile, Grid2D, InitialData, run
from dampwave.diagnostics import (MultiplierParams, beta_hat, calibrate_k, gk_series, gk_violations,
                                  poincare_sample)

grid = Grid2D(60.0, 481)
data = InitialData.from_bumps(grid, [], [Bump((0.0, 0.0), 2.0, 1.0)], 2.0)
a = DampingProfile().sample(grid)
params = MultiplierParams(eps0=1.0, L=4.0)
res = run(data, a, 50.0, sample_every=4, params=params)

k = calibrate_k(res.records, params)
print("smallest k in the doubling search:", k)
print("beta_hat:", beta_hat(res.records, params, k))
g = gk_series(res.records, params, k)
print("G_k at t = 0, 10, 50:", g[0], g[len(g) // 5], g[-1])

# %% [markdown]
# G_k is affine in k, so one run covers every k.  Very large k can fail in
# the discrete setting, because the integer-level energy wiggles by O(dt^2).

# %%
for kk in (4, 64, 1024):
    neg, up = gk_violations(res.records, params, kk)
    print(f"k = {kk:5d}: negative samples {len(neg)}, increases {len(up)}")

# %%
for seed in (0, 1):
    est = poincare_sample(rho=1.0, n_samples=300, rng_seed=seed)
    print(f"seed {seed}: empirical C(1) >= {est.constant:.4f} (skipped {est.skipped})")
