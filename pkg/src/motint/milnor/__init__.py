"""Newton-nondegenerate polynomials: strata, zeta functions, Milnor fibres
and the two independent checks (arc counts and Puiseux sampling)."""
from .decompose import (MilnorResult, Stratum, decompose, euler_milnor, milnor_fiber,
                        strata, zeta_f)
from .newton import Face, NewtonData, Nondegeneracy, is_nondegenerate, newton
from .oracle import (OracleReport, action_lcm, arc_count_oracle, choose_primes,
                     pipeline_value, verify)
from .poly import Poly, parse_poly
from .sampler import MembershipReport, is_member, sample_membership

__all__ = [
    "Face", "MembershipReport", "MilnorResult", "NewtonData", "Nondegeneracy", "OracleReport",
    "Poly", "Stratum", "action_lcm", "arc_count_oracle", "choose_primes", "decompose",
    "euler_milnor", "is_member", "is_nondegenerate", "milnor_fiber", "newton", "parse_poly",
    "pipeline_value", "sample_membership", "strata", "verify", "zeta_f",
]
