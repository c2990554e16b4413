"""S-spectrum functional calculus for right-linear operators on Clifford modules."""

from .errors import *  # noqa: F401,F403
from .clifford import (CliffordElement, ImaginaryUnit, Paravector, SpectralSphere,
                       basis_element, parse_clifford)
from .linalg import (ModuleVector, RightLinearOperator, eigen_spheres, op_add,
                     op_compose, op_inverse, op_norm, op_scale_left, op_scale_right)
from .functions import (Flavor, Growth, SliceFunction, make_polynomial, make_rational,
                        parse_function_id, regularizer)
from .relations import LinearRelation, rel_compose, rel_from_operator, rel_sum
from .calculus import (ContourSpec, SectorSpec, certify_bisectorial, omega_calc,
                       qs_inverse, s_resolvent_left, s_resolvent_right, s_spectrum)
from .hinfty import (HinftyResult, choose_regularizer, hinf_left, hinf_right,
                     poly_calc_right, rational_calc_right, rn_operator)

__version__ = "0.1.0"
