"""Residue calculus on S_n and Hamiltonicity certificates for 2-diregular digraphs."""

from .perm import Perm, compose, inverse, parity, size, is_cyclic, parse_cycles, format_cycles
from .permset import (
    PermSet,
    excluded_set,
    residue,
    translate,
    classify_parity_case,
    intersects_cyclic,
    residue_theorem_check,
    find_biconjugacy,
    equivalent,
)
from .digraph import Digraph, validate, ac_decompose, split, splice_pair, spliced_graph, read_graph, write_graph
from .factors import enumerate_factors, open_routes, is_hamiltonian, classify_parity_family
from .certify import Certificate, check, verify_certificate
from .enumeration import FamilySpec, canonical_form, generate, census

__all__ = [name for name in dir() if not name.startswith("_")]
