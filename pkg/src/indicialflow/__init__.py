"""Indicial pencils of cone operators: roots, spectral flow, singular functions,
the adjoint pairing and deficiency indices of first-order cone realizations."""

__version__ = "0.1.0"

from .adjoint_pairing import GramForm, Verdict, gram, pair, verify_signature_equals_sf
from .cone_ode import (ConeRealization, DeficiencyReport, deficiency_indices, lagrangian_boundary,
                       verify_null_cobordism)
from .cutoff import CutoffSpec
from .errors import *  # noqa: F401,F403
from .model_zoo import CircleSymbol, circle_dirac, circle_pencil, random_dirac, random_pencil
from .numerics import SignatureTriple, hermitian_signature
from .pencil import (DiracData, IndicialRoot, SelfAdjointPencil, dirac_block, dirac_resolvent,
                     indicial_roots, normalize_strip, scale)
from .singular_functions import (LogPowerElement, SingularSpaceBasis, apply_indicial_operator,
                                 singular_space_basis, strip_decomposition)
from .spectral_flow import (SpectralFlowReport, choose_window, sf_crossing_form, sf_endpoint,
                            sf_partition, spectral_flow)
