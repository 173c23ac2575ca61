import numpy as np
import pytest

from sigmapoly.core import FilippovSystem, PolyField, SwitchingFunction
from sigmapoly.poly2 import Poly2, poly_const, poly_x, poly_y


@pytest.fixture
def h_y():
    return SwitchingFunction(poly_y())


@pytest.fixture
def fold_field():
    # X = (1, x): visible fold at the origin, exact transition map
    # T(x) = (1 - x^2)/2 onto {x = 1}
    return PolyField(poly_const(1.0), poly_x())


@pytest.fixture
def cusp_field():
    # X = (1, x^2): cusp (3rd order contact) at the origin
    return PolyField(poly_const(1.0), poly_x() * poly_x())


@pytest.fixture
def pitchfork_field():
    # X = (1, x^3 - x): the lambda = 1 member of X_lam = (1, x^3 - lam x)
    return PolyField(poly_const(1.0), poly_x() * poly_x() * poly_x() - poly_x())


def make_system(fy_x, gy_x, h=None):
    """Z with X = (1, fy(x)), Y = (1, gy(x)) and h = y."""
    one = poly_const(1.0)
    return FilippovSystem(
        PolyField(one, fy_x),
        PolyField(one, gy_x),
        h or SwitchingFunction(poly_y()),
    )
