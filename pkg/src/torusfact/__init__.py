"""Matrix Wiener-Hopf factorization on tori and obstructions to it on T^3."""

from .circle import FactorizationResult, Regularization, mean_motion, regularize, wh_factorize
from .document import parse_document, read_samples, serialize, write_samples
from .errors import *  # noqa: F401,F403
from .funcalc import functional_calc
from .grid import SampledMap, evaluate, fejer_project, unitarize
from .invariants import (Certificate, ComponentDescriptor, InFactorSubgroup, Obstructed,
                         component_descriptor, obstruction_certificate, pi3_degree,
                         torus3_decompose)
from .polymat import MatrixPolynomial
from .scalar import ScalarFactorization, scalar_factorize, winding_vector
from .series import (LexSplit, MatrixSeries, ScalarSeries, det_series, mul, spectrum, split_pm,
                     wiener_norm)
from .smith import smith_form
from .toeplitz import toeplitz_indices_oracle
from .witness import build_witness, cube_to_sphere, su2_chart, witness_series

__version__ = "0.1.0"
