"""Exact integral geometry of complex space forms.

Coefficients live in ``Q[pi, 1/pi][lambda]``; ``lambda`` is either a rational
number or kept formal (``None``).
"""

from .curvature import (
    CurvElement,
    act_s,
    act_t,
    act_t_lambda,
    act_u,
    act_val_lambda,
    angular_test,
    ell,
    first_variation_mu,
    free_decompose,
    glob_kernel_basis,
    globalize,
    n_kernel_polys,
    nn,
    nn_inverse,
    recompose,
    restrict_curv,
)
from .local_kinematic import complex_kinematic, local_kinematic, semi_local, shifrin
from .polys import STPoly, TUPoly
from .scalars import LambdaScalar, Scalar, binomial, double_factorial, omega
from .serialize import dumps, loads
from .tensor import Tensor
from .trig import IntegralAtom, TrigPoly
from .valuations import (
    ValElement,
    eval_on_ball,
    eval_on_cpm,
    iso_map,
    kinematic,
    kinematic_chi,
    multiply,
    pd_pairing,
    restrict_val,
    vol_star,
)

__version__ = "0.1.0"

__all__ = [
    "CurvElement",
    "IntegralAtom",
    "LambdaScalar",
    "STPoly",
    "Scalar",
    "TUPoly",
    "Tensor",
    "TrigPoly",
    "ValElement",
    "act_s",
    "act_t",
    "act_t_lambda",
    "act_u",
    "act_val_lambda",
    "angular_test",
    "binomial",
    "complex_kinematic",
    "double_factorial",
    "dumps",
    "ell",
    "eval_on_ball",
    "eval_on_cpm",
    "first_variation_mu",
    "free_decompose",
    "glob_kernel_basis",
    "globalize",
    "iso_map",
    "kinematic",
    "kinematic_chi",
    "loads",
    "local_kinematic",
    "multiply",
    "n_kernel_polys",
    "nn",
    "nn_inverse",
    "omega",
    "pd_pairing",
    "recompose",
    "restrict_curv",
    "restrict_val",
    "semi_local",
    "shifrin",
    "vol_star",
]
