"""Verification laboratory for weighted Carleman inequalities on warped
cylindrical ends.

The package is organised bottom-up:

``funcjet``
    closed-form jets (value + three derivatives) for the radial families.
``geometry``
    warped cylinders, curvature tables, mode Laplacians, cutoff pairs.
``weights``
    the admissible weight bundle (F, A, k2 bounds, k1 budget) and scans.
``growth``
    a small asymptotic-symbol algebra with a total growth preorder.
``verifier``
    shifted weighted quadrature and per-mode Carleman inequality checks.
``cases``
    the seven concrete end geometries with their weight recipes.
``regimes``
    hypothesis-condition checks and per-case certificates.
``applications``
    minimal graph profiles, catenoid decay rates, conformal necessity.
``cli``
    the ``carleman`` command line front end.
"""

from carleman.funcjet import (
    DomainError,
    DescriptorError,
    FamilyParameterError,
    FunctionJet3,
    UnknownFamilyError,
    eval_jet,
    make_family,
    parse_descriptor,
)
from carleman.cases import CASE_IDS, ParameterRangeError, make_case
from carleman.regimes import (
    Certificate,
    RegimeVerdict,
    check_conditions,
    corollary_certificate,
)
from carleman.applications import (
    DecayReport,
    GraphProfile,
    catenoid_decay_report,
    conformal_necessity,
    radial_graph_q,
    radial_minimal_profile,
)

__all__ = [
    "CASE_IDS",
    "Certificate",
    "DecayReport",
    "DomainError",
    "DescriptorError",
    "FamilyParameterError",
    "FunctionJet3",
    "GraphProfile",
    "ParameterRangeError",
    "RegimeVerdict",
    "UnknownFamilyError",
    "catenoid_decay_report",
    "check_conditions",
    "conformal_necessity",
    "corollary_certificate",
    "eval_jet",
    "make_case",
    "make_family",
    "parse_descriptor",
    "radial_graph_q",
    "radial_minimal_profile",
]

__version__ = "0.1.0"
