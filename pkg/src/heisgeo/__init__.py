"""Sub-Riemannian geometry of the Heisenberg groups H_n.

p-area elements and p-normal vectors of hypersurfaces, Pansu spheres,
projected p-areas along Pansu p-normals, and a numerically verified
Cauchy-type surface area formula, with a small expression language for
user-supplied profiles and deterministic/Monte Carlo quadrature.
"""

from .core import (AmbientVector, Constants, ContactVector, HPoint, apply_J,
                   constants, coords_to_frame, direction_to_pansu_point,
                   frame_to_coords, group_inv, group_mul, levi_inner,
                   pushforward, pushforward_ambient, sphere_surface_area,
                   theta_eval, unit_ball_volume)
from .quadrature import (IntegralResult, QuadratureSpec,
                         angular_abs_cos_integral, mc_stream,
                         periodic_abs_sinusoid_integral, radial_integral,
                         sphere_abs_dot_integral, sphere_integral,
                         surface_integral)
from .surfaces import (GraphSurface, PansuSphere, RotationalSurface,
                       SchemaError, SingularPointError, Surface, SurfacePoint,
                       check_rotational_conditions, p_area,
                       p_area_element_graph, p_area_element_rotational,
                       p_normal_graph, p_normal_rotational, pansu_area_closed_form,
                       pansu_gradient, pansu_height, surface_from_spec)
from .projection import (AmbientDirection, PansuDirection,
                         ProjectionDecomposition, decompose_AB,
                         euclid_sphere_projection, projected_parea,
                         projected_parea_ambient,
                         rotational_projection_closed_form)
from .verify import Report, ReportRow, VerifyConfig, report_all, run

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
