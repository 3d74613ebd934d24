"""In-process storage cluster: shards on n nodes, failure injection, cooperative repair.

Bytes map one per field element. A file is cut into stripes of ``k * ell``
bytes, each stripe is encoded on its own, and every node keeps an
``(ell, stripes)`` payload. Repair runs all stripes of a node pair at once, so
message counts are per stripe and byte counts cover all stripes.
"""

from __future__ import annotations

import hashlib
import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .msrcode import CodeParams, encode, erasure_decode, make_params, syndrome
from .repair import RepairTranscript, check_optimal, repair as coop_repair

MAGIC = b"CMSR1"
WORD = 8


class ShardFormatError(ValueError):
    pass


class NodeFailed(LookupError):
    pass


@dataclass
class Shard:
    node: int
    n: int
    k: int
    p: int
    m: int
    lambdas: tuple[int, ...]
    gammas: tuple[int, ...]
    tau: int
    length: int
    payload: np.ndarray  # (ell, stripes)

    @classmethod
    def of(cls, params: CodeParams, node: int, length: int, payload: np.ndarray) -> Shard:
        return cls(node, params.n, params.k, params.p, params.m, tuple(params.lambdas),
                   tuple(params.gammas), params.tau, length, payload)

    def params(self) -> CodeParams:
        return make_params(self.n, self.k, self.p, self.lambdas, self.gammas, self.tau)

    def header_key(self) -> tuple:
        return (self.n, self.k, self.p, self.m, self.lambdas, self.gammas, self.tau, self.length)

    def to_bytes(self) -> bytes:
        stripes = self.payload.shape[1]
        head = [self.n, self.k, self.p, self.m, self.node, *self.lambdas, *self.gammas,
                self.tau, self.length, stripes]
        body = np.ascontiguousarray(self.payload.T, dtype="<i8").tobytes()
        return MAGIC + struct.pack(f"<{len(head)}q", *head) + body

    @classmethod
    def from_bytes(cls, blob: bytes) -> Shard:
        if not blob.startswith(MAGIC):
            raise ShardFormatError("bad magic")
        pos = len(MAGIC)

        def take(count):
            nonlocal pos
            end = pos + count * WORD
            if end > len(blob):
                raise ShardFormatError("truncated header")
            out = struct.unpack_from(f"<{count}q", blob, pos)
            pos = end
            return out

        n, k, p, m, node = take(5)
        if not n > k >= 1 or n - k < 2 or not 1 <= node <= n:
            raise ShardFormatError(f"implausible header n={n} k={k} node={node}")
        lambdas = take(n)
        gammas = take(n - k - 2)
        tau, length, stripes = take(3)
        ell = (n - k) ** m
        body = blob[pos:]
        if len(body) != ell * stripes * WORD:
            raise ShardFormatError(
                f"payload has {len(body)} bytes, header promises {ell * stripes * WORD}"
            )
        payload = np.frombuffer(body, dtype="<i8").astype(np.int64).reshape(stripes, ell).T
        return cls(node, n, k, p, m, tuple(lambdas), tuple(gammas), tau, length, payload.copy())

    def digest(self) -> str:
        return hashlib.sha256(self.to_bytes()).hexdigest()


@dataclass
class Cluster:
    params: CodeParams
    length: int
    nodes: dict  # node -> (ell, stripes) payload, or None when failed
    ledger: list = field(default_factory=list)
    cycles: int = 0

    @property
    def stripes(self) -> int:
        return next(v for v in self.nodes.values() if v is not None).shape[1]

    @property
    def failed(self) -> tuple[int, ...]:
        return tuple(j for j in sorted(self.nodes) if self.nodes[j] is None)

    def read(self, node: int) -> np.ndarray:
        self._check_node(node)
        if self.nodes[node] is None:
            raise NodeFailed(f"node {node} failed")
        return self.nodes[node]

    def shard(self, node: int) -> Shard:
        return Shard.of(self.params, node, self.length, self.read(node))

    def _check_node(self, node: int):
        if not 1 <= node <= self.params.n:
            raise ValueError(f"node {node} outside [1, {self.params.n}]")

    def codeword(self) -> np.ndarray:
        """(n, ell, stripes) with zeros at failed nodes."""
        c = np.zeros((self.params.n, self.params.ell, self.stripes), dtype=np.int64)
        for j, v in self.nodes.items():
            if v is not None:
                c[j - 1] = v
        return c

    def fail(self, i1: int, i2: int) -> Cluster:
        for j in (i1, i2):
            self._check_node(j)
        if i1 == i2:
            raise ValueError("fail needs two distinct nodes")
        for j in (i1, i2):
            if self.nodes[j] is None:
                raise ValueError(f"node {j} already failed")
        if len(self.failed) + 2 > self.params.r:
            raise ValueError(f"more than r={self.params.r} failures would make data unrecoverable")
        self.nodes[i1] = self.nodes[i2] = None
        return self

    def repair(self) -> tuple[Cluster, RepairTranscript]:
        down = self.failed
        if len(down) != 2:
            raise ValueError(f"repair needs exactly 2 failed nodes, have {len(down)}")
        i1, i2 = down
        c1, c2, tr = coop_repair(self.params, self.codeword(), i1, i2)
        self.nodes[i1], self.nodes[i2] = c1, c2
        self.cycles += 1
        for msg in tr.messages:
            self.ledger.append({
                "cycle": self.cycles,
                "from": msg.src,
                "to": msg.dst,
                "kind": msg.kind,
                "symbols": msg.symbols,
                "round": msg.round,
                "bytes": msg.symbols * self.stripes * WORD,
            })
        if not self.syndrome_ok():
            raise AssertionError("repaired cluster fails the parity check")
        return self, tr

    def ledger_totals(self, cycle: int | None = None) -> dict:
        cycle = self.cycles if cycle is None else cycle
        out = {"download": 0, "collab": 0}
        for entry in self.ledger:
            if entry["cycle"] == cycle:
                out[entry["kind"]] += entry["symbols"]
        return out

    def syndrome_ok(self) -> bool:
        if self.failed:
            return False
        return not np.any(syndrome(self.params, self.codeword()))

    def decode(self, available=None) -> bytes:
        alive = [j for j in sorted(self.nodes) if self.nodes[j] is not None]
        use = alive if available is None else sorted(set(int(j) for j in available))
        for j in use:
            self.read(j)
        if len(use) < self.params.k:
            raise ValueError(f"need at least k={self.params.k} shards, have {len(use)}")
        erased = [j for j in range(1, self.params.n + 1) if j not in use]
        c = self.codeword()
        if erased:
            c = erasure_decode(self.params, c, erased, cache=True)
        data = c[: self.params.k].transpose(2, 0, 1).reshape(-1)
        return data[: self.length].astype(np.uint8).tobytes()

    def export_ledger(self, path) -> None:
        with open(path, "w") as fh:
            for entry in self.ledger:
                fh.write(json.dumps(entry) + "\n")

    def save(self, directory) -> None:
        d = Path(directory)
        d.mkdir(parents=True, exist_ok=True)
        for j in sorted(self.nodes):
            path = d / f"node_{j}.cmsr"
            if self.nodes[j] is None:
                path.unlink(missing_ok=True)
            else:
                path.write_bytes(self.shard(j).to_bytes())

    @classmethod
    def load(cls, directory) -> Cluster:
        d = Path(directory)
        if not d.is_dir():
            raise FileNotFoundError(f"no shard directory {d}")
        shards = {}
        for path in sorted(d.glob("node_*.cmsr")):
            s = Shard.from_bytes(path.read_bytes())
            if path.name != f"node_{s.node}.cmsr":
                raise ShardFormatError(f"{path.name} holds node {s.node}")
            shards[s.node] = s
        if not shards:
            raise FileNotFoundError(f"no shards in {d}")
        first = next(iter(shards.values()))
        for s in shards.values():
            if s.header_key() != first.header_key():
                raise ShardFormatError(f"node {s.node} header disagrees with node {first.node}")
            if s.payload.shape[1] != first.payload.shape[1]:
                raise ShardFormatError(f"node {s.node} has a different stripe count")
        params = first.params()
        nodes = {j: (shards[j].payload if j in shards else None) for j in range(1, params.n + 1)}
        return cls(params, first.length, nodes)


def ingest(params: CodeParams, source: bytes, chunk: bool = True) -> Cluster:
    """Encode ``source`` into a fresh cluster, one stripe per ``k * ell`` bytes."""
    per = params.k * params.ell
    if len(source) > per and not chunk:
        raise ValueError(f"{len(source)} bytes exceed one stripe of {per} bytes")
    stripes = max(1, -(-len(source) // per))
    raw = np.zeros(stripes * per, dtype=np.int64)
    raw[: len(source)] = np.frombuffer(source, dtype=np.uint8)
    data = raw.reshape(stripes, params.k, params.ell).transpose(1, 2, 0)
    c = encode(params, data)
    nodes = {j: c[j - 1].copy() for j in range(1, params.n + 1)}
    return Cluster(params, len(source), nodes)


def fail(cluster: Cluster, i1: int, i2: int) -> Cluster:
    return cluster.fail(i1, i2)


def repair(cluster: Cluster) -> tuple[Cluster, RepairTranscript]:
    return cluster.repair()


def repair_report(cluster: Cluster, transcript: RepairTranscript) -> dict:
    verdict = check_optimal(transcript, cluster.params)
    report = transcript.to_dict()
    report["optimal"] = verdict.ok
    report["stripes"] = cluster.stripes
    report["ledger"] = cluster.ledger_totals()
    return report
