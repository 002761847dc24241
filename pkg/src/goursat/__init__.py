"""Goursat-Volterra kernels and the Volterra transforms of Brownian motion they define.

Modules
-------
basis       reproducing bases, Gramians, ``alpha_t`` and its limit
kernel      Goursat kernels, Müntz closed forms, identity checks, Hardy bound
paths       time grids, seeded Brownian paths, discrete Wiener integrals
transform   the Volterra transform, Laguerre iterates, the particular solution X0
bridge      generalized bridges and the solution family of the singular SDE
harmonic    space-time harmonic functions and the tilted measure
stats       Monte Carlo estimators and band checks
cli         command line driver
"""

from .basis import (BasisFunction, FunctionBasis, alpha, alpha_infinity, gramian, load_basis,
                    parse_basis, phi)
from .bridge import BridgeSpec, SolutionSpec, generalized_bridge, sde_solution
from .errors import ConfigError, GoursatError, NumericalError
from .harmonic import EndpointLaw, harmonic_h, martingale_check, tilted_sampler
from .kernel import GoursatKernel, goursat_kernel, muntz_coefficients, muntz_kernel, parse_kernel
from .paths import RngSpec, SamplePath, TimeGrid, sample_brownian
from .transform import iterate_transform, laguerre_direct, recover_y, volterra_transform, x_zero

__version__ = "0.1.0"
