"""Exact Kempf and Harder-Narasimhan filtrations on finite subobject
lattices, and the desk-scale verification that they coincide.

The public surface re-exports the working pieces: polynomial arithmetic
under the eventual order (`poly`), the monotone-cone maximizer
(`cone`), lattice instances and generators (`model`), the greedy HN
algorithm (`hn`), and the chain-enumerating Kempf maximizer with the
equality verifier (`kempf`).
"""

from .poly import (EQUAL, GREATER, LESS, InputError, ModeMismatch, Poly,
                   RationalFunction, ScaleValue, poly_compare_eventual,
                   poly_to_str, reduced_compare, scale_compare)
from .cone import (ConeInstance, GraphData, InvalidInstance, Maximizer,
                   NotInCone, ZeroGamma, concave_envelope, cone_generators,
                   envelope_graph, graph_points, kempf_direction, mu_value,
                   project_monotone, separation_certificate)
from .model import (ObjectData, StabilityParams, SubobjectLattice, TooLarge,
                    Violation, WrongMode, corrected_polynomial,
                    effective_polynomial, find_destabilizer, gen_random_lattice,
                    gen_split_bundle, is_semistable, lattice_from_json,
                    lattice_to_json, validate_lattice)
from .hn import (DegenerateQuotient, Filtration, NotUnique, all_chains,
                 blocks_semistable, check_hn_properties, hn_filtration,
                 maximal_destabilizer, quotient_data, strict_descent)
from .kempf import (BadM, InvariantViolation, KempfResult, LengthMismatch,
                    NonMonotoneEps, NonPositiveWeight, NoStabilization,
                    UniquenessViolated, VerifyReport, WeightedFiltration,
                    chain_vector, git_weight, git_weight_pair, kempf_filtration,
                    kempf_function, maximal_chains, stabilization_check,
                    verify_equality)

__version__ = "0.1.0"

__all__ = [
    "EQUAL", "GREATER", "LESS", "InputError", "ModeMismatch", "Poly",
    "RationalFunction", "ScaleValue", "poly_compare_eventual", "poly_to_str",
    "reduced_compare", "scale_compare",
    "ConeInstance", "GraphData", "InvalidInstance", "Maximizer", "NotInCone",
    "ZeroGamma", "concave_envelope", "cone_generators", "envelope_graph",
    "graph_points", "kempf_direction", "mu_value", "project_monotone",
    "separation_certificate",
    "ObjectData", "StabilityParams", "SubobjectLattice", "TooLarge",
    "Violation", "WrongMode", "corrected_polynomial", "effective_polynomial",
    "find_destabilizer", "gen_random_lattice", "gen_split_bundle",
    "is_semistable", "lattice_from_json", "lattice_to_json", "validate_lattice",
    "DegenerateQuotient", "Filtration", "NotUnique", "all_chains",
    "blocks_semistable", "check_hn_properties", "hn_filtration",
    "maximal_destabilizer", "quotient_data", "strict_descent",
    "BadM", "InvariantViolation", "KempfResult", "LengthMismatch",
    "NonMonotoneEps", "NonPositiveWeight", "NoStabilization",
    "UniquenessViolated", "VerifyReport", "WeightedFiltration", "chain_vector",
    "git_weight", "git_weight_pair", "kempf_filtration", "kempf_function",
    "maximal_chains", "stabilization_check", "verify_equality",
    "__version__",
]
