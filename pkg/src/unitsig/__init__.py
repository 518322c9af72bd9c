"""Unit groups and unit signature ranks of real multiquadratic fields."""

__version__ = "0.1.0"

from .arith import DomainError, FactorizationBudgetError, squarefree_part, jacobi, primes_matching
from .quadfield import QuadUnit, fundamental_unit, m_of_unit, sqrt_unit_presentation, predict_norm_sign
from .mqfield import MQField, MQElement, construct, is_square
from .unitgroup import (UnitSystem, saturate, signature_rank, classify_biquadratic,
                        subfield_units, tp_independent_lower_bound)
from .families import (possible_m, possible_m_three_primes, verify_family,
                       enumerate_residue_configs, density_constant, cyclotomic_deficiency_bound)

__all__ = [
    "DomainError", "FactorizationBudgetError", "squarefree_part", "jacobi", "primes_matching",
    "QuadUnit", "fundamental_unit", "m_of_unit", "sqrt_unit_presentation", "predict_norm_sign",
    "MQField", "MQElement", "construct", "is_square",
    "UnitSystem", "saturate", "signature_rank", "classify_biquadratic", "subfield_units",
    "tp_independent_lower_bound",
    "possible_m", "possible_m_three_primes", "verify_family", "enumerate_residue_configs",
    "density_constant", "cyclotomic_deficiency_bound",
]
