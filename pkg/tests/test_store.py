from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mds53.construction import STORAGE_OVERHEAD
from mds53.errors import ClusterError, NodeFormatError
from mds53.repair import RepairPlan, make_repair_plan
from mds53.store import (
    LENGTH_PREFIX,
    encode_file,
    fail_node,
    ingest,
    open_cluster,
    read_node_header,
    reconstruct_file,
    repair_node,
    unframe,
)

SYMBOL = 4096


@pytest.fixture(scope="module")
def payload():
    return np.random.default_rng(1).bytes(1 << 20)


@pytest.fixture
def cluster(tmp_path, inst, payload):
    return encode_file(payload, SYMBOL, inst, tmp_path / "cluster")


def _stripes_to_bytes(stripes):
    return b"".join(bytes(s) for m in stripes for s in m.symbols())


def test_empty_file_is_one_stripe():
    layout, stripes = ingest(b"", 4)
    assert layout.stripe_count == 1
    assert layout.original_length == 0
    assert _stripes_to_bytes(stripes) == bytes(24)


def test_small_symbols_need_more_stripes():
    layout, stripes = ingest(b"abc", 1)
    # 8 length bytes + 3 data bytes over 6-byte stripes
    assert layout.stripe_count == 2
    assert _stripes_to_bytes(stripes)[:LENGTH_PREFIX] == (3).to_bytes(8, "little")


@given(st.binary(max_size=300), st.integers(1, 17))
def test_framing_roundtrip(data, symbol_size):
    layout, stripes = ingest(data, symbol_size)
    raw = _stripes_to_bytes(stripes)
    assert len(raw) == layout.padded_size
    assert unframe(raw) == data


def test_unframe_rejects_bad_lengths():
    with pytest.raises(ClusterError):
        unframe(b"\x00" * 4)
    with pytest.raises(ClusterError):
        unframe((100).to_bytes(8, "little") + b"short")


def test_layout_of_one_mebibyte(cluster):
    layout = cluster.layout
    assert layout.stripe_count == 43
    assert layout.symbol_size == SYMBOL
    payload_total = 5 * layout.node_payload_bytes
    assert Fraction(payload_total, layout.padded_size) == STORAGE_OVERHEAD


def test_any_three_nodes_rebuild_the_file(cluster, payload):
    for subset in combinations(range(1, 6), 3):
        assert reconstruct_file(cluster, subset) == payload


@pytest.mark.parametrize("node", [1, 2, 3, 4, 5])
def test_fail_and_repair_each_node(cluster, node):
    path = cluster.node(node).path
    original = path.read_bytes()
    fail_node(cluster, node)
    assert path.stat().st_size == 0
    assert cluster.failed_nodes() == [node]

    report = repair_node(cluster, node)
    assert path.read_bytes() == original
    assert cluster.failed_nodes() == []
    assert report.downloaded_bytes == 4 * SYMBOL * 43
    assert report.naive_bytes == 6 * SYMBOL * 43
    assert set(report.per_helper) == set(range(1, 6)) - {node}
    assert all(b == SYMBOL * 43 for b in report.per_helper.values())
    assert report.ratio == pytest.approx(2 / 3)


def test_repairing_a_healthy_node_is_a_no_op(cluster):
    before = cluster.node(2).path.read_bytes()
    repair_node(cluster, 2)
    assert cluster.node(2).path.read_bytes() == before


def test_two_failures_need_reconstruct(cluster, payload):
    fail_node(cluster, 2)
    fail_node(cluster, 5)
    with pytest.raises(ClusterError, match="reconstruct"):
        repair_node(cluster, 2)
    assert reconstruct_file(cluster) == payload
    assert reconstruct_file(cluster, (1, 3, 4)) == payload
    with pytest.raises(ClusterError):
        reconstruct_file(cluster, (1, 2, 3))


def test_three_failures_are_fatal(cluster):
    for node in (1, 2, 3):
        fail_node(cluster, node)
    with pytest.raises(ClusterError):
        reconstruct_file(cluster)


def test_reopen_from_disk(cluster, payload):
    fail_node(cluster, 4)
    again = open_cluster(cluster.directory)
    assert again.failed_nodes() == [4]
    assert again.layout.stripe_count == 43
    assert again.inst.params == cluster.inst.params
    repair_node(again, 4)
    assert reconstruct_file(open_cluster(cluster.directory), (3, 4, 5)) == payload


def test_node_headers(cluster):
    header, offset = read_node_header(cluster.node(5).path)
    assert header.node_id == 5
    assert header.symbol_size == SYMBOL
    assert header.stripe_count == 43
    assert header.params.serialize() == "q=4;poly=0x7;lambda=2;mu=3;theta=3;eta=2"
    assert cluster.node(5).path.stat().st_size == offset + 2 * SYMBOL * 43


def test_corrupt_magic_is_detected(cluster):
    path = cluster.node(1).path
    raw = bytearray(path.read_bytes())
    raw[0] ^= 0xFF
    path.write_bytes(bytes(raw))
    with pytest.raises(NodeFormatError):
        read_node_header(path)


def test_missing_cluster(tmp_path):
    with pytest.raises(ClusterError):
        open_cluster(tmp_path / "nothing")


def test_small_file_roundtrip(tmp_path, inst):
    cluster = encode_file(b"hello, storage", 4, inst, tmp_path)
    fail_node(cluster, 1)
    repair_node(cluster, 1)
    assert reconstruct_file(cluster, (1, 4, 5)) == b"hello, storage"


def test_tampered_plan_leaves_the_node_failed(cluster):
    plan = make_repair_plan(3, cluster.inst)
    tampered = RepairPlan.from_manifest(
        plan.to_manifest().replace("reconstruct 0x00 0x01 0x02 0x02", "reconstruct 0x01 0x00 0x00 0x01")
    )
    fail_node(cluster, 3)
    with pytest.raises(ClusterError, match="reconstruct"):
        repair_node(cluster, 3, tampered)
    assert cluster.failed_nodes() == [3]
    assert cluster.node(3).path.stat().st_size == 0
    report = repair_node(cluster, 3, RepairPlan.from_manifest(plan.to_manifest()))
    assert report.downloaded_bytes == 4 * SYMBOL * 43
