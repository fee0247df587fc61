"""
Encode a 6-symbol message into 5 node segments and decode it back from any 3.

Symbols are either encoded field scalars (ints) or packed symbol blocks
(uint8 numpy arrays). The same code path serves both: every output symbol is
a field linear combination of input symbols (galois.combine).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

from mds53.construction import (
    ALL_NODES,
    K,
    PARITY_NODES,
    SYSTEMATIC_NODES,
    CodeInstance,
)
from mds53.errors import DecodeError, LinalgError
from mds53.galois import combine, symbols_equal
from mds53.linalg import Mat, block, mat_inv, mat_inv2, mat_scale, transpose, vstack

log = logging.getLogger(__name__)

Segment = tuple  # (symbol, symbol)


def _check_segment(seg: Sequence, what: str) -> tuple:
    if len(seg) != 2:
        raise DecodeError(f"{what} must hold 2 symbols, got {len(seg)}")
    return tuple(seg)


def segments_equal(a: Sequence[Segment], b: Sequence[Segment]) -> bool:
    return len(a) == len(b) and all(
        symbols_equal(x, y) for sa, sb in zip(a, b) for x, y in zip(sa, sb)
    )


@dataclass(frozen=True, eq=False)
class Message:
    """Three segments m1, m2, m3 of two symbols each."""

    segments: tuple

    def __post_init__(self) -> None:
        if len(self.segments) != 3:
            raise DecodeError(f"a message has 3 segments, got {len(self.segments)}")
        object.__setattr__(
            self, "segments", tuple(_check_segment(s, "message segment") for s in self.segments)
        )

    @classmethod
    def from_symbols(cls, symbols: Sequence) -> Message:
        if len(symbols) != 6:
            raise DecodeError(f"a message has 6 symbols, got {len(symbols)}")
        return cls(((symbols[0], symbols[1]), (symbols[2], symbols[3]), (symbols[4], symbols[5])))

    def symbols(self) -> tuple:
        return tuple(s for seg in self.segments for s in seg)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Message):
            return NotImplemented
        return segments_equal(self.segments, other.segments)


@dataclass(frozen=True, eq=False)
class Codeword:
    """Five node segments; segment(i) is what node i stores."""

    segments: tuple

    def __post_init__(self) -> None:
        if len(self.segments) != 5:
            raise DecodeError(f"a codeword has 5 segments, got {len(self.segments)}")
        object.__setattr__(
            self, "segments", tuple(_check_segment(s, "node segment") for s in self.segments)
        )

    def segment(self, node: int) -> Segment:
        return self.segments[node - 1]

    def pick(self, nodes: Sequence[int]) -> list[Segment]:
        return [self.segment(n) for n in nodes]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Codeword):
            return NotImplemented
        return segments_equal(self.segments, other.segments)


@dataclass(frozen=True, eq=False)
class DecodeSpec:
    """m = matrix @ [u_a; u_b; u_c] for the sorted subset (a, b, c)."""

    subset: tuple[int, int, int]
    strategy: str
    matrix: Mat

    def apply(self, segments: Sequence[Segment]) -> Message:
        received = [s for seg in segments for s in seg]
        field = self.matrix.field
        rows = self.matrix.tolist()
        return Message.from_symbols([combine(field, row, received) for row in rows])


def all_subsets() -> list[tuple[int, int, int]]:
    """The ten 3-node subsets, lexicographic."""
    return list(combinations(ALL_NODES, K))


def normalize_subset(subset: Sequence[int]) -> tuple[int, int, int]:
    nodes = tuple(subset)
    if len(nodes) != K:
        raise DecodeError(f"decode needs exactly 3 nodes, got {len(nodes)}")
    if len(set(nodes)) != K:
        raise DecodeError(f"decode needs 3 distinct nodes, got {nodes}")
    bad = [n for n in nodes if n not in ALL_NODES]
    if bad:
        raise DecodeError(f"nodes {bad} are not in 1..5")
    return tuple(sorted(nodes))


def encode(message: Message, inst: CodeInstance) -> Codeword:
    """u = P m, two rows of P per node."""
    m = message.symbols()
    field = inst.field
    u = [combine(field, row, m) for row in inst.generator.tolist()]
    return Codeword(tuple((u[2 * i], u[2 * i + 1]) for i in range(5)))


def _systematic_rows(inst: CodeInstance, layout: dict[int, list[Mat]]) -> Mat:
    """Stack 3 row-blocks (one per message segment) of three 2x2 blocks each."""
    return block(inst.field, [layout[j] for j in SYSTEMATIC_NODES])


def _build_decode(subset: tuple[int, int, int], inst: CodeInstance) -> DecodeSpec:
    f = inst.field
    eye = Mat.identity(f, 2)
    zero = Mat.zeros(f, 2, 2)
    systematic = [n for n in subset if n in SYSTEMATIC_NODES]
    parity = [n for n in subset if n in PARITY_NODES]

    if not parity:
        return DecodeSpec(subset, "systematic", Mat.identity(f, 6))

    if len(systematic) == 2:
        i, j = systematic
        (k,) = [n for n in SYSTEMATIC_NODES if n not in systematic]
        layout: dict[int, list[Mat]] = {
            i: [eye, zero, zero],
            j: [zero, eye, zero],
        }
        if parity == [4]:
            # m_k = u4 - m_i - m_j
            layout[k] = [eye, eye, eye]
            return DecodeSpec(subset, "parity-sum", _systematic_rows(inst, layout))
        # m_k = A_k^-T (u5 - A_i^T m_i - A_j^T m_j)
        bk = transpose(mat_inv2(inst.coeff(k)))
        layout[k] = [
            mat_scale(f.neg(1), bk @ transpose(inst.coeff(i))),
            mat_scale(f.neg(1), bk @ transpose(inst.coeff(j))),
            bk,
        ]
        return DecodeSpec(subset, "parity-weighted", _systematic_rows(inst, layout))

    stacked = vstack([inst.node_rows(n) for n in subset])
    return DecodeSpec(subset, "elimination", mat_inv(stacked))


def decode_matrix(subset: Sequence[int], inst: CodeInstance) -> DecodeSpec:
    """Decode recipe for a subset, cached on the instance."""
    key = normalize_subset(subset)
    spec = inst.decode_cache.get(key)
    if spec is None:
        try:
            spec = _build_decode(key, inst)
        except LinalgError as exc:
            raise DecodeError(
                f"nodes {key} do not determine the message (code is not MDS): {exc}"
            ) from exc
        inst.decode_cache[key] = spec
        log.debug("decode recipe for %s: %s", key, spec.strategy)
    return spec


def decode(
    subset: Sequence[int],
    segments: Sequence[Segment],
    inst: CodeInstance,
    *,
    check: tuple[int, Segment] | None = None,
) -> Message:
    """
    Recover the message from the segments of three distinct nodes.

    segments[i] belongs to subset[i]; order does not matter. With
    check=(node, segment) the result is re-encoded and compared against a
    fourth node's segment.
    """
    if len(segments) != len(tuple(subset)):
        raise DecodeError(f"{len(segments)} segments for {len(tuple(subset))} nodes")
    key = normalize_subset(subset)
    by_node = dict(zip(subset, (_check_segment(s, "node segment") for s in segments)))
    spec = decode_matrix(key, inst)
    message = spec.apply([by_node[n] for n in key])

    if check is not None:
        node, expected = check
        if node not in ALL_NODES or node in key:
            raise DecodeError(f"check node {node} must be a node outside the decode subset {key}")
        actual = encode(message, inst).segment(node)
        if not segments_equal([actual], [_check_segment(expected, "check segment")]):
            raise DecodeError(f"segments are inconsistent: node {node} does not match the decoded message")
    return message
