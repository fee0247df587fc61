"""
Brute-force cross-checks for small fields.

Goal:
- Census: walk all q^4 parameter tuples and record which pass every design
  condition (and how often each condition fails).
- MDS: check all ten 3-node subsets have a full-rank stacked generator.
- Repair search: for a failed node, try every pair of download vectors on the
  two mixed helpers and keep the ones that really repair the node on every
  scalar message. Nothing here uses the closed-form download vectors.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import combinations, product
from typing import Mapping

import numpy as np
import pandas as pd

from mds53.construction import (
    ALL_NODES,
    CONDITION_LABELS,
    CONDITION_NAMES,
    K,
    MESSAGE_SYMBOLS,
    CodeInstance,
    CodeParams,
    check_conditions,
    check_node,
)
from mds53.errors import InconsistentSystemError, OracleError, SingularMatrixError
from mds53.galois import FieldSpec
from mds53.linalg import Mat, Vec2, mat_inv, mat_rank, row_vec, solve, transpose, vstack

log = logging.getLogger(__name__)

# q^4 tuples for the census, q^6 messages for the repair search
MAX_CENSUS_ORDER = 16
MAX_MESSAGE_ORDER = 8


@dataclass(frozen=True)
class ParamCensus:
    field: FieldSpec
    valid: tuple[CodeParams, ...]
    violations: Mapping[str, int]
    total: int

    def to_lines(self) -> list[str]:
        return [p.serialize() for p in self.valid]

    def to_text(self) -> str:
        return "".join(line + "\n" for line in self.to_lines())

    def to_frame(self) -> pd.DataFrame:
        render = self.field.render
        rows = [
            {
                "lambda": p.lambda_,
                "mu": p.mu,
                "theta": p.theta,
                "eta": p.eta,
                "rendered": f"{render(p.lambda_)}, {render(p.mu)}, {render(p.theta)}, {render(p.eta)}",
                "params": p.serialize(),
            }
            for p in self.valid
        ]
        return pd.DataFrame(rows, columns=["lambda", "mu", "theta", "eta", "rendered", "params"])

    def violation_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "condition": list(self.violations),
                "meaning": [CONDITION_NAMES[c] for c in self.violations],
                "violating_tuples": list(self.violations.values()),
            }
        )


def enumerate_valid_params(field: FieldSpec) -> ParamCensus:
    """Every (lambda, mu, theta, eta) over `field`, lexicographic, filtered by check_conditions."""
    if field.order > MAX_CENSUS_ORDER:
        raise OracleError(f"census is limited to q <= {MAX_CENSUS_ORDER}, got {field}")
    counts = {label: 0 for label in CONDITION_LABELS}
    valid = []
    total = 0
    for values in product(range(field.order), repeat=4):
        params = CodeParams(*values, field=field)
        violated = check_conditions(params)
        for label in violated:
            counts[label] += 1
        if not violated:
            valid.append(params)
        total += 1
    log.info("census over %s: %d of %d tuples valid", field, len(valid), total)
    return ParamCensus(field, tuple(valid), counts, total)


def brute_force_mds(inst: CodeInstance) -> bool:
    """True iff every 3 nodes' generator rows have rank 6."""
    for subset in combinations(ALL_NODES, K):
        stacked = vstack([inst.node_rows(n) for n in subset])
        if mat_rank(stacked) != MESSAGE_SYMBOLS:
            log.info("subset %s has rank %d", subset, mat_rank(stacked))
            return False
    return True


# Vectorized message enumeration
def _apply(field: FieldSpec, coeffs: np.ndarray, symbols: np.ndarray) -> np.ndarray:
    """(N, c) symbols times an (r, c) coefficient matrix -> (N, r)."""
    prods = field.mul_table[coeffs[None, :, :], symbols[:, None, :]]
    return np.bitwise_xor.reduce(prods, axis=2)


def all_scalar_messages(field: FieldSpec) -> np.ndarray:
    """All q^6 scalar messages as a (q^6, 6) uint8 array, lexicographic."""
    if field.order > MAX_MESSAGE_ORDER:
        raise OracleError(f"message enumeration is limited to q <= {MAX_MESSAGE_ORDER}, got {field}")
    grids = np.indices((field.order,) * MESSAGE_SYMBOLS).reshape(MESSAGE_SYMBOLS, -1).T
    return grids.astype(np.uint8)


def encode_all(inst: CodeInstance, messages: np.ndarray) -> np.ndarray:
    """(N, 10) codewords for (N, 6) messages."""
    return _apply(inst.field, inst.generator.entries, messages)


@dataclass(frozen=True)
class RepairSearch:
    """Both filters of the exhaustive search, kept apart so they can be compared."""

    failed: int
    mixed: tuple[int, int]
    candidates: int
    rank_ok: frozenset
    repairs: frozenset

    @property
    def valid(self) -> frozenset:
        return self.rank_ok & self.repairs


def _vectors(field: FieldSpec, nonzero: bool = True) -> list[Vec2]:
    return [Vec2(x, y) for x, y in product(range(field.order), repeat=2) if not nonzero or (x or y)]


def _directions(field: FieldSpec) -> list[Vec2]:
    """One nonzero vector per line through the origin."""
    return [Vec2(1, y) for y in range(field.order)] + [Vec2(0, 1)]


def repair_candidates(failed: int, inst: CodeInstance) -> RepairSearch:
    """
    Try every pair (v1, v2) of nonzero download vectors on the two highest
    numbered survivors. The two lowest numbered survivors act as basis
    helpers and may send any single combination of their segment.
    """
    check_node(failed)
    f = inst.field
    survivors = [n for n in ALL_NODES if n != failed]
    a, b = survivors[:2]
    p1, p2 = survivors[2:]

    rows_f = inst.node_rows(failed)
    try:
        back = mat_inv(vstack([inst.node_rows(a), inst.node_rows(b), rows_f]))
    except SingularMatrixError as exc:
        raise OracleError(f"nodes {a}, {b}, {failed} are not independent") from exc
    in_basis = {p: inst.node_rows(p) @ back for p in (p1, p2)}

    messages = all_scalar_messages(f)
    codewords = encode_all(inst, messages)
    target = codewords[:, 2 * (failed - 1) : 2 * failed]
    helper_rows = {n: inst.node_rows(n) for n in (a, b, p1, p2)}

    rank_ok = set()
    repairs = set()
    candidates = 0
    for v1, v2 in product(_vectors(f), repeat=2):
        candidates += 1
        if _aligned(f, in_basis[p1], in_basis[p2], v1, v2):
            rank_ok.add((v1, v2))
        if _repairs_exactly(f, helper_rows, (a, b, p1, p2), v1, v2, rows_f, messages, target):
            repairs.add((v1, v2))
    log.info(
        "repair search node %d: %d candidates, %d aligned, %d repair",
        failed, candidates, len(rank_ok), len(repairs),
    )
    return RepairSearch(failed, (p1, p2), candidates, frozenset(rank_ok), frozenset(repairs))


def _aligned(f: FieldSpec, g1: Mat, g2: Mat, v1: Vec2, v2: Vec2) -> bool:
    for cols in (slice(0, 2), slice(2, 4)):
        interference = Mat.from_rows(f, [row_vec(v1, g1[:, cols]), row_vec(v2, g2[:, cols])])
        if mat_rank(interference) != 1:
            return False
    signal = Mat.from_rows(f, [row_vec(v1, g1[:, 4:6]), row_vec(v2, g2[:, 4:6])])
    return mat_rank(signal) == 2


def _repairs_exactly(
    f: FieldSpec,
    helper_rows: dict[int, Mat],
    order: tuple[int, int, int, int],
    v1: Vec2,
    v2: Vec2,
    rows_f: Mat,
    messages: np.ndarray,
    target: np.ndarray,
) -> bool:
    a, b, p1, p2 = order
    sent = [Mat.row(f, v1) @ helper_rows[p1], Mat.row(f, v2) @ helper_rows[p2]]
    for ha, hb in product(_directions(f), repeat=2):
        downloads = vstack(sent + [Mat.row(f, ha) @ helper_rows[a], Mat.row(f, hb) @ helper_rows[b]])
        try:
            combo = transpose(solve(transpose(downloads), transpose(rows_f)))
        except InconsistentSystemError:
            continue
        received = _apply(f, downloads.entries, messages)
        if np.array_equal(_apply(f, combo.entries, received), target):
            return True
    return False


def brute_force_repair_search(failed: int, inst: CodeInstance) -> frozenset:
    """(v1, v2) pairs on the mixed helpers that pass alignment and repair every message."""
    return repair_candidates(failed, inst).valid
