"""Exact nonnegative matrix semigroups over products of rationals, and their automorphisms."""

from .autom import (Automorphism, AutomorphismSpec, Homothety, HomothetySpec, Inner, RingMap, apply,
                    make_automorphism, sample_check_automorphism)
from .decompose import (Decomposition, decompose, default_probes, extract_central_data,
                        extract_ring_automorphism, normalize_permutation_images, verify_decomposition)
from .errors import OrdmatError
from .involution import (BlockDiagForm, IdempotentSystem, block_diagonalize, block_diagonalize_monomial,
                         canonical_conjugator, idempotent_system, involution_to_scaled_perm)
from .matgroup import (GenWord, Mat, Perm, block_decomposition, eval_word, is_member, perm_matrix,
                       standard_substitution, transvection, verify_equiv_chain)
from .ring import RingAutomorphism, RingDescriptor, RingElem, check_order_axioms, parse_ring

__all__ = [
    "Automorphism", "AutomorphismSpec", "BlockDiagForm", "Decomposition", "GenWord", "Homothety",
    "HomothetySpec", "IdempotentSystem", "Inner", "Mat", "OrdmatError", "Perm", "RingAutomorphism",
    "RingDescriptor", "RingElem", "RingMap", "apply", "block_decomposition", "block_diagonalize",
    "block_diagonalize_monomial", "canonical_conjugator", "check_order_axioms", "decompose",
    "default_probes", "eval_word", "extract_central_data", "extract_ring_automorphism",
    "idempotent_system", "involution_to_scaled_perm", "is_member", "make_automorphism",
    "normalize_permutation_images", "parse_ring", "perm_matrix", "sample_check_automorphism",
    "standard_substitution", "transvection", "verify_decomposition", "verify_equiv_chain",
]
