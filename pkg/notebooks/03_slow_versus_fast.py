# %% [markdown]
# # Slow and fast controls
#
# Selection needs `eps` to vanish slowly (not integrable).  With a fast
# control such as `(1 + t)^(-2)` the trajectory still reaches `argmin f`,
# but where it lands depends on the starting point.

# %%
from rnflow import PowerLaw, h1_model_check, limit_dependence_probe
from rnflow import convex_atoms as ca
from rnflow.schedules import default_grid

f = ca.shift_to_zero_min(ca.Sum([ca.Translate(ca.AbsValue(), [1.0]), ca.Translate(ca.AbsValue(), [-1.0])]))
inits = [([5.0], [2.0]), ([-5.0], [-2.0])]

for p in (0.5, 0.75, 1.0, 2.0):
    s = PowerLaw(1.0, p)
    limits = limit_dependence_probe(f, 1.0, s, inits, T=2000.0)
    print(f"p={p:4}  {s.classify()}  h2_k={s.h2_constant()}  limits={[round(float(x[0]), 4) for x in limits]}")

# %% [markdown]
# The quadratic-growth check behind the (H1) hypothesis: `f` grows at least
# like `(r/2) dist^2` to its argmin on the sampled grid, and the schedule
# must be square integrable.

# %%
for p in (0.4, 0.75):
    print(p, h1_model_check(f, PowerLaw(1.0, p), f.project_argmin, default_grid([0.0])))
