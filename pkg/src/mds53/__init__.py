"""mds53: a (5,3) MDS storage code over GF(4) with optimal single-node repair."""

from mds53.codec import Codeword, Message, decode, encode
from mds53.construction import CodeInstance, CodeParams, canonical_params, make_instance
from mds53.galois import GF4, FieldSpec
from mds53.repair import execute_repair, make_repair_plan

__all__ = [
    "GF4",
    "CodeInstance",
    "CodeParams",
    "Codeword",
    "FieldSpec",
    "Message",
    "canonical_params",
    "decode",
    "encode",
    "execute_repair",
    "make_instance",
    "make_repair_plan",
]
