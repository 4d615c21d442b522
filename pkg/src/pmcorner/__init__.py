"""Corner discontinuities of prescribed mean curvature graphs.

Analytic barriers (Scherk, Delaunay, torus and helicoid graphs), a
finite-element solver for the relaxed Dirichlet problem, comparison and
certificate tools, and a config-driven runner.
"""

from .config import ScenarioConfig, load_config, parse_config, serialize_config
from .domain import (DomainSpec, Region, annulus_domain, build_domain_2d,
                     build_meridian_domain, disk_domain, gset_boundary, subregions)
from .errors import *  # noqa: F401,F403
from .mesh import BoundaryLayer, CornerPatch, Mesh, generate_mesh, read_mesh, write_mesh
from .params import ParameterSet, derive_parameters, validate_ledger
from .runner import RunResult, dumps_json, run, run_file
from .solver import (ScalarField, SolveOptions, energy, pde_residual, solve_axisymmetric,
                     solve_dirichlet_relaxed)
from .surfaces import (catenoid_field, delaunay_profile, helicoid_build,
                       mean_curvature_residual, scherk_eval, scherk_radial_limit, unit_nodoid)
from .verify import (Barrier, boundary_trace, comparison_check, contact_angle,
                     discontinuity_certificate, mango_identity_check)

__version__ = "0.1.0"
