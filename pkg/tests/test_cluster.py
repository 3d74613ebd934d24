from itertools import combinations

import numpy as np
import pytest

from coopmsr.cluster import Cluster, NodeFailed, Shard, ShardFormatError, ingest
from coopmsr.msrcode import make_params

P42 = make_params(4, 2)
P53 = make_params(5, 3)


def payload(size, seed=0):
    return np.random.default_rng(seed).integers(0, 256, size, dtype=np.uint8).tobytes()


def test_empty_input():
    cl = ingest(P42, b"")
    assert cl.stripes == 1
    assert all(not v.any() for v in cl.nodes.values())
    assert cl.syndrome_ok()
    assert cl.decode() == b""


def test_exact_stripe():
    cl = ingest(P42, payload(2 * 64))
    assert cl.stripes == 1
    with pytest.raises(ValueError):
        ingest(P42, payload(2 * 64 + 1), chunk=False)
    assert ingest(P42, payload(2 * 64 + 1)).stripes == 2


def test_any_k_shards_reconstruct():
    src = payload(5000, 1)
    cl = ingest(P53, src)
    for keep in combinations(range(1, 6), 3):
        assert cl.decode(keep) == src


def test_fail_errors():
    cl = ingest(P42, payload(300))
    cl.fail(1, 2)
    with pytest.raises(NodeFailed, match="node 1 failed"):
        cl.read(1)
    with pytest.raises(ValueError):
        cl.fail(1, 3)
    fresh = ingest(P42, payload(300))
    with pytest.raises(ValueError):
        fresh.fail(2, 2)
    with pytest.raises(ValueError):
        fresh.fail(0, 5)


def test_repair_requires_two_failures():
    cl = ingest(P42, payload(10))
    with pytest.raises(ValueError, match="exactly 2"):
        cl.repair()


def test_repair_cycle_restores_shards_and_ledger():
    cl = ingest(P53, payload(9000, 2))
    n, ell, r = 5, P53.ell, P53.r
    digests = {j: cl.shard(j).digest() for j in range(1, n + 1)}
    for cycle, pair in enumerate(combinations(range(1, n + 1), 2), 1):
        cl.fail(*pair)
        cl, tr = cl.repair()
        assert cl.syndrome_ok()
        assert {j: cl.shard(j).digest() for j in range(1, n + 1)} == digests
        entries = [e for e in cl.ledger if e["cycle"] == cycle]
        downloads = [e for e in entries if e["kind"] == "download"]
        assert len(downloads) == 2 * (n - 2)
        assert all(e["symbols"] == ell // r for e in downloads)
        totals = cl.ledger_totals()
        assert totals["download"] == 2 * (n - 2) * ell // r == tr.downloaded
        assert totals["collab"] == 2 * ell // r == tr.collaborated


def test_save_load_and_ledger_export(tmp_path):
    src = payload(1000, 3)
    cl = ingest(P42, src)
    cl.save(tmp_path)
    assert sorted(p.name for p in tmp_path.iterdir()) == [f"node_{j}.cmsr" for j in range(1, 5)]
    back = Cluster.load(tmp_path)
    assert back.params == P42 and back.decode() == src
    (tmp_path / "node_2.cmsr").unlink()
    (tmp_path / "node_4.cmsr").unlink()
    partial = Cluster.load(tmp_path)
    assert partial.failed == (2, 4)
    partial.repair()
    partial.export_ledger(tmp_path / "ledger.jsonl")
    lines = (tmp_path / "ledger.jsonl").read_text().splitlines()
    assert len(lines) == len(partial.ledger) > 0


def test_shard_format():
    cl = ingest(P42, payload(100))
    blob = cl.shard(3).to_bytes()
    assert blob[:5] == b"CMSR1"
    head = np.frombuffer(blob[5:5 + 8 * 5], dtype="<i8").tolist()
    assert head == [4, 2, 65537, 6, 3]
    s = Shard.from_bytes(blob)
    assert s.node == 3 and np.array_equal(s.payload, cl.read(3))
    with pytest.raises(ShardFormatError):
        Shard.from_bytes(b"XXXX" + blob[4:])
    with pytest.raises(ShardFormatError):
        Shard.from_bytes(blob[:-8])


def test_mismatched_headers_rejected(tmp_path):
    ingest(P42, payload(10)).save(tmp_path)
    other = ingest(P42, payload(20))
    (tmp_path / "node_1.cmsr").write_bytes(other.shard(1).to_bytes())
    with pytest.raises(ShardFormatError):
        Cluster.load(tmp_path)
