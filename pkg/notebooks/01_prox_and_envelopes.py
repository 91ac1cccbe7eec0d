# %% [markdown]
# # Proximal maps, envelopes and the potential psi
#
# The flows in `rnflow` never touch a subdifferential directly.  They only
# need `prox_{mu f}`, which every atom and combinator provides in closed
# form.  This notebook checks the basic identities on a few atoms.

# %%
import numpy as np

from rnflow import convex_atoms as ca
from rnflow.moreau import EnvelopeContext, envelope, grad_psi_discrepancy, psi, psi_dual, yosida

# %% [markdown]
# Soft thresholding is the prox of `|x|`.  The envelope is the Huber
# function and its gradient, the Yosida approximation, is clipped to `[-1, 1]`.

# %%
ctx = EnvelopeContext(ca.AbsValue(), 1.0)
ys = np.linspace(-3, 3, 7)[:, None]
print("y      prox   env    yosida")
for y in ys:
    print(f"{y[0]:5.1f}  {ca.prox(ctx.f, 1.0, y)[0]:5.2f}  {envelope(ctx, y):5.2f}  {yosida(ctx, y)[0]:5.2f}")

# %% [markdown]
# Combinators compose.  A translated, tilted, scaled separable sum still has
# an exact prox, and the result satisfies the optimality condition
# `(y - x) / mu in df(x)`, checked through the Fenchel equality.

# %%
f = ca.Scale(ca.AddLinear(ca.SeparableSum([ca.AbsValue(), ca.IndicatorBox([0.0], [1.0])]), [0.3, 0.0]), 2.0)
y = np.array([1.7, -0.4])
x = ca.prox(f, 0.5, y)
print("prox:", x, "optimal:", ca.subgradient_check(f, x, (y - x) / 0.5, 1e-9))

# %% [markdown]
# `psi(y) = |y|^2/2 - mu env(y)` has gradient `prox(y)`.  It can also be
# written through the conjugate alone.  Both routes agree, and central
# differences recover the prox.

# %%
ctx = EnvelopeContext(f, 0.5)
rng = np.random.default_rng(0)
pts = 3 * rng.normal(size=(200, 2))
print("max |psi - psi_dual|:", max(abs(psi(ctx, p) - psi_dual(ctx, p)) for p in pts))
print("max |grad psi - prox|:", max(grad_psi_discrepancy(ctx, p) for p in pts))

# %% [markdown]
# Problems can be written as JSON trees, which is what the command line uses.

# %%
tree = {"type": "sum", "children": [
    {"type": "translate", "f": {"type": "abs"}, "shift": [1]},
    {"type": "translate", "f": {"type": "abs"}, "shift": [-1]},
]}
g = ca.shift_to_zero_min(ca.from_json(tree))
print("g(0) =", g.value(np.zeros(1)), " g(3) =", g.value(np.array([3.0])))
