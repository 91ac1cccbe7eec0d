import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from rnflow import convex_atoms as ca  # noqa: E402


def _catalog():
    rng = np.random.default_rng(7)
    G = rng.normal(size=(2, 2))
    R = rng.normal(size=(1, 3))
    return {
        "quadratic_pd": ca.Quadratic(G @ G.T + 0.1 * np.eye(2), [0.5, -1.0], 0.3),
        "quadratic_hyperplane": ca.Quadratic([[1.0, 1.0], [1.0, 1.0]], [-2.0, -2.0], 2.0),
        "abs": ca.AbsValue(),
        "norm1": ca.NormOne(3),
        "box": ca.IndicatorBox([1.0, -1.0], [2.0, 3.0]),
        "halfspace": ca.IndicatorHalfspace([1.0, 2.0], -1.0),
        "affine": ca.IndicatorAffine(R, [0.7]),
        "half_sq_dist_box": ca.HalfSqDistToBox([-1.0, 0.0], [1.0, 2.0]),
        "abs_sum": ca.Sum([ca.Translate(ca.AbsValue(), [1.0]), ca.Translate(ca.AbsValue(), [-1.0])]),
        "separable": ca.SeparableSum([ca.AbsValue(), ca.Quadratic([[2.0]], [1.0])]),
        "translate": ca.Translate(ca.NormOne(2), [0.5, -1.5]),
        "add_linear": ca.AddLinear(ca.Quadratic(np.eye(2)), [2.0, -1.0]),
        "scale": ca.Scale(ca.AbsValue(), 2.5),
        "shift_value": ca.ShiftValue(ca.HalfSqDistToBox([0.0], [1.0]), 1.5),
    }


CATALOG = _catalog()


@pytest.fixture(params=sorted(CATALOG))
def atom(request):
    return CATALOG[request.param]


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)


def hyperplane():
    """0.5 (x1 + x2 - 2)^2."""
    return ca.Quadratic([[1.0, 1.0], [1.0, 1.0]], [-2.0, -2.0], 2.0)


def abs_pair():
    """|x - 1| + |x + 1| - 2."""
    return ca.shift_to_zero_min(
        ca.Sum([ca.Translate(ca.AbsValue(), [1.0]), ca.Translate(ca.AbsValue(), [-1.0])])
    )
