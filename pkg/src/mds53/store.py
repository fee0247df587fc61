"""
A five-node store simulated with one file per node in a cluster directory.

Goal:
- Frame a file (8-byte little-endian length + data), zero-pad it to whole
  stripes of 6 symbols and encode every stripe.
- Write node{i}.seg files (header + stripe-major payload) and manifest.csv.
- Fail a node (truncate its file), repair it from one combined symbol per
  helper and stripe, or rebuild the file from any three healthy nodes.

Node file layout (little-endian):
    magic "MDS53\\0" | version u16 | params length u16 | params utf-8 |
    symbol_size u32 | stripe_count u64 | node_id u8 | payload
Payload: for each stripe, the node's two symbols back to back.
"""

from __future__ import annotations

import logging
import struct
from dataclasses import dataclass, field as dc_field
from pathlib import Path
from typing import Sequence

import numpy as np
import pandas as pd

from mds53 import config
from mds53.codec import Message, decode_matrix, encode
from mds53.construction import (
    ALL_NODES,
    ALPHA,
    K,
    MESSAGE_SYMBOLS,
    SYSTEMATIC_NODES,
    CodeInstance,
    CodeParams,
    check_node,
    make_instance,
)
from mds53.errors import ClusterError, MDSError, NodeFormatError
from mds53.repair import (
    RepairPlan,
    execute_repair,
    helper_symbol,
    make_repair_plan,
    verify_alignment,
)

log = logging.getLogger(__name__)

MAGIC = b"MDS53\x00"
FORMAT_VERSION = 1
LENGTH_PREFIX = 8
_HEAD = struct.Struct("<6sHH")
_TAIL = struct.Struct("<IQB")

HEALTHY = "healthy"
FAILED = "failed"


@dataclass(frozen=True)
class StripeLayout:
    symbol_size: int
    stripe_count: int
    original_length: int | None = None
    padding: str = "le64-length-prefix+zero-fill"

    @property
    def stripe_bytes(self) -> int:
        return MESSAGE_SYMBOLS * self.symbol_size

    @property
    def padded_size(self) -> int:
        return self.stripe_count * self.stripe_bytes

    @property
    def node_payload_bytes(self) -> int:
        return self.stripe_count * ALPHA * self.symbol_size


@dataclass(frozen=True)
class NodeHeader:
    params: CodeParams
    symbol_size: int
    stripe_count: int
    node_id: int
    version: int = FORMAT_VERSION

    def pack(self) -> bytes:
        text = self.params.serialize().encode("utf-8")
        return (
            _HEAD.pack(MAGIC, self.version, len(text))
            + text
            + _TAIL.pack(self.symbol_size, self.stripe_count, self.node_id)
        )

    @property
    def size(self) -> int:
        return len(self.pack())


@dataclass
class NodeStore:
    node_id: int
    role: str
    status: str
    path: Path

    @property
    def healthy(self) -> bool:
        return self.status == HEALTHY


@dataclass
class Cluster:
    directory: Path
    inst: CodeInstance
    layout: StripeLayout
    nodes: list[NodeStore] = dc_field(default_factory=list)

    def node(self, node_id: int) -> NodeStore:
        check_node(node_id)
        return self.nodes[node_id - 1]

    def healthy_nodes(self) -> list[int]:
        return [n.node_id for n in self.nodes if n.healthy]

    def failed_nodes(self) -> list[int]:
        return [n.node_id for n in self.nodes if not n.healthy]

    def header_for(self, node_id: int) -> NodeHeader:
        return NodeHeader(self.inst.params, self.layout.symbol_size, self.layout.stripe_count, node_id)

    def save_manifest(self) -> Path:
        rows = [
            {"node_id": n.node_id, "role": n.role, "status": n.status, "path": n.path.name}
            for n in self.nodes
        ]
        out = self.directory / config.MANIFEST_NAME
        pd.DataFrame(rows).to_csv(out, index=False)
        return out


@dataclass(frozen=True)
class RepairReport:
    node_id: int
    stripe_count: int
    symbol_size: int
    per_helper: dict[int, int]
    downloaded_bytes: int
    naive_bytes: int
    plan: RepairPlan

    @property
    def ratio(self) -> float:
        return self.downloaded_bytes / self.naive_bytes


# Framing
def ingest(data: bytes, symbol_size: int) -> tuple[StripeLayout, list[Message]]:
    """Frame and pad `data`, then cut it into one Message per stripe."""
    if symbol_size < 1:
        raise ClusterError(f"symbol size must be positive, got {symbol_size}")
    framed = len(data).to_bytes(LENGTH_PREFIX, "little") + bytes(data)
    stripe_bytes = MESSAGE_SYMBOLS * symbol_size
    stripe_count = max(1, -(-len(framed) // stripe_bytes))
    padded = framed + bytes(stripe_count * stripe_bytes - len(framed))
    grid = np.frombuffer(padded, dtype=np.uint8).reshape(stripe_count, MESSAGE_SYMBOLS, symbol_size)
    stripes = [Message.from_symbols(list(grid[s])) for s in range(stripe_count)]
    return StripeLayout(symbol_size, stripe_count, len(data)), stripes


def unframe(payload: bytes) -> bytes:
    """Inverse of the framing in ingest: strip the length prefix and padding."""
    if len(payload) < LENGTH_PREFIX:
        raise ClusterError("payload is shorter than its length prefix")
    length = int.from_bytes(payload[:LENGTH_PREFIX], "little")
    if length > len(payload) - LENGTH_PREFIX:
        raise ClusterError(f"recorded length {length} exceeds the decoded payload")
    return payload[LENGTH_PREFIX : LENGTH_PREFIX + length]


def _batch(stripes: Sequence[Message]) -> Message:
    """One Message whose symbols are (stripes, symbol_size) columns."""
    columns = list(zip(*(m.symbols() for m in stripes)))
    return Message.from_symbols([np.stack(col) for col in columns])


# Node files
def read_node_header(path: Path) -> tuple[NodeHeader, int]:
    """Header and the byte offset where the payload starts."""
    raw = path.read_bytes()
    try:
        magic, version, n = _HEAD.unpack_from(raw, 0)
        if magic != MAGIC:
            raise NodeFormatError(f"{path}: bad magic {magic!r}")
        if version != FORMAT_VERSION:
            raise NodeFormatError(f"{path}: unsupported format version {version}")
        text = raw[_HEAD.size : _HEAD.size + n].decode("utf-8")
        symbol_size, stripe_count, node_id = _TAIL.unpack_from(raw, _HEAD.size + n)
    except (struct.error, UnicodeDecodeError) as exc:
        raise NodeFormatError(f"{path}: truncated or corrupt header") from exc
    header = NodeHeader(CodeParams.parse(text), symbol_size, stripe_count, node_id, version)
    return header, _HEAD.size + n + _TAIL.size


def read_segments(cluster: Cluster, node_id: int) -> np.ndarray:
    """(stripes, 2, symbol_size) payload of a healthy node."""
    node = cluster.node(node_id)
    if not node.healthy:
        raise ClusterError(f"node {node_id} is failed; it cannot serve reads")
    header, offset = read_node_header(node.path)
    if header != cluster.header_for(node_id):
        raise NodeFormatError(f"{node.path}: header does not match the cluster")
    payload = node.path.read_bytes()[offset:]
    if len(payload) != cluster.layout.node_payload_bytes:
        raise NodeFormatError(
            f"{node.path}: payload has {len(payload)} bytes, expected {cluster.layout.node_payload_bytes}"
        )
    return np.frombuffer(payload, dtype=np.uint8).reshape(
        cluster.layout.stripe_count, ALPHA, cluster.layout.symbol_size
    )


def _write_node(cluster: Cluster, node_id: int, segment: tuple) -> int:
    payload = np.stack(segment, axis=1).tobytes()
    path = cluster.node(node_id).path
    data = cluster.header_for(node_id).pack() + payload
    path.write_bytes(data)
    log.info("wrote node %d: %d bytes", node_id, len(data))
    return len(payload)


# Cluster operations
def write_cluster(
    layout: StripeLayout, stripes: Sequence[Message], inst: CodeInstance, directory: Path
) -> Cluster:
    """Encode every stripe and write five node files plus the manifest."""
    if len(stripes) != layout.stripe_count:
        raise ClusterError(f"layout says {layout.stripe_count} stripes, got {len(stripes)}")
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    nodes = [
        NodeStore(
            node_id=i,
            role="systematic" if i in SYSTEMATIC_NODES else "parity",
            status=HEALTHY,
            path=directory / config.node_file_name(i),
        )
        for i in ALL_NODES
    ]
    cluster = Cluster(directory, inst, layout, nodes)
    codeword = encode(_batch(stripes), inst)
    for i in ALL_NODES:
        _write_node(cluster, i, codeword.segment(i))
    cluster.save_manifest()
    return cluster


def encode_file(data: bytes, symbol_size: int, inst: CodeInstance, directory: Path) -> Cluster:
    layout, stripes = ingest(data, symbol_size)
    return write_cluster(layout, stripes, inst, directory)


def open_cluster(directory: Path) -> Cluster:
    """Load manifest.csv and the node headers; every healthy header must agree."""
    directory = Path(directory)
    manifest = directory / config.MANIFEST_NAME
    if not manifest.exists():
        raise ClusterError(f"{manifest} not found. Run `mds53 encode` first.")
    table = pd.read_csv(manifest)
    if sorted(table["node_id"].tolist()) != list(ALL_NODES):
        raise ClusterError(f"{manifest} must list nodes 1..5")
    nodes = [
        NodeStore(int(r.node_id), str(r.role), str(r.status), directory / str(r.path))
        for r in table.sort_values("node_id").itertuples(index=False)
    ]
    headers = []
    for node in nodes:
        if not node.healthy:
            continue
        if not node.path.exists() or node.path.stat().st_size == 0:
            log.warning("node %d is marked healthy but its file is missing or empty", node.node_id)
            node.status = FAILED
            continue
        headers.append(read_node_header(node.path)[0])
    if not headers:
        raise ClusterError(f"no healthy node left in {directory}")
    first = headers[0]
    for h in headers[1:]:
        if (h.params, h.symbol_size, h.stripe_count) != (first.params, first.symbol_size, first.stripe_count):
            raise NodeFormatError(f"node {h.node_id} header disagrees with node {first.node_id}")
    layout = StripeLayout(first.symbol_size, first.stripe_count)
    return Cluster(directory, make_instance(first.params), layout, nodes)


def fail_node(cluster: Cluster, node_id: int) -> None:
    """Simulate a lost node: its file is truncated to zero bytes."""
    node = cluster.node(node_id)
    node.path.write_bytes(b"")
    node.status = FAILED
    cluster.save_manifest()
    log.info("failed node %d", node_id)


def repair_node(cluster: Cluster, failed_id: int, plan: RepairPlan | None = None) -> RepairReport:
    """
    Rebuild one node from the other four, one combined symbol per helper and
    stripe. Repairing a healthy node rewrites it with identical bytes.
    """
    check_node(failed_id)
    others_down = [n for n in cluster.failed_nodes() if n != failed_id]
    if others_down:
        raise ClusterError(
            f"nodes {', '.join(map(str, cluster.failed_nodes()))} are down; "
            "single-node repair needs four healthy helpers, use reconstruct instead"
        )
    if plan is None:
        plan = make_repair_plan(failed_id, cluster.inst)
    else:
        if plan.failed != failed_id:
            raise ClusterError(f"plan repairs node {plan.failed}, not node {failed_id}")
        report = verify_alignment(plan, cluster.inst)
        if not report.ok:
            names = ", ".join(c.name for c in report.failures())
            raise ClusterError(f"plan for node {failed_id} fails alignment checks: {names}")

    downloaded = {}
    per_helper = {}
    for helper in plan.helpers:
        segs = read_segments(cluster, helper)
        symbol = helper_symbol(plan, helper, (segs[:, 0, :], segs[:, 1, :]))
        downloaded[helper] = symbol
        per_helper[helper] = int(symbol.nbytes)
        log.info("node %d -> node %d: %d bytes", helper, failed_id, symbol.nbytes)

    segment = execute_repair(plan, downloaded)
    _write_node(cluster, failed_id, segment)
    cluster.node(failed_id).status = HEALTHY
    cluster.save_manifest()

    layout = cluster.layout
    return RepairReport(
        node_id=failed_id,
        stripe_count=layout.stripe_count,
        symbol_size=layout.symbol_size,
        per_helper=per_helper,
        downloaded_bytes=sum(per_helper.values()),
        naive_bytes=K * ALPHA * layout.symbol_size * layout.stripe_count,
        plan=plan,
    )


def reconstruct_file(cluster: Cluster, node_ids: Sequence[int] | None = None) -> bytes:
    """Decode every stripe from three healthy nodes and strip the framing."""
    healthy = cluster.healthy_nodes()
    if node_ids is None:
        if len(healthy) < K:
            raise ClusterError(
                f"only {len(healthy)} healthy node(s) ({', '.join(map(str, healthy)) or 'none'}); "
                "at least 3 are needed to rebuild the file"
            )
        node_ids = healthy[:K]
    node_ids = tuple(node_ids)
    down = [n for n in node_ids if n not in healthy]
    if down:
        raise ClusterError(f"nodes {down} are not healthy")
    try:
        spec = decode_matrix(node_ids, cluster.inst)
    except MDSError as exc:
        raise ClusterError(str(exc)) from exc
    segments = []
    for n in spec.subset:
        segs = read_segments(cluster, n)
        segments.append((segs[:, 0, :], segs[:, 1, :]))
    message = spec.apply(segments)
    stripes = np.stack(message.symbols(), axis=1)
    return unframe(stripes.tobytes())
