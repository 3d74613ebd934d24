"""Optimal-access cooperative MSR codes for two simultaneous node failures."""

from .gf import Field, FieldElement, make_field
from .msrcode import CodeParams, encode, erasure_decode, make_params, syndrome, verify_mds
from .pairmap import PairMap

__version__ = "0.1.0"
