"""Witness certificates for stabilizer characters of Klyachko-model pair
groups in GL_n, checked exactly and against a finite-field oracle."""

from .certificate import WitnessCertificate, dump_certificate, load_certificate, verify_certificate
from .exactfield import CharacterValue, Field, FieldElement, additive_character, make_field
from .matlin import Matrix, parse_matrix, to_text
from .modelgroups import ModelShape, PairShape, TildeHElement
from .witness import find_witness

__version__ = "0.1.0"

__all__ = [
    "CharacterValue",
    "Field",
    "FieldElement",
    "Matrix",
    "ModelShape",
    "PairShape",
    "TildeHElement",
    "WitnessCertificate",
    "additive_character",
    "dump_certificate",
    "find_witness",
    "load_certificate",
    "make_field",
    "parse_matrix",
    "to_text",
    "verify_certificate",
]
