"""A simulated cluster: ingest bytes, lose two nodes, repair, read back."""

import os
import tempfile

from coopmsr import make_params
from coopmsr.cluster import Cluster, ingest, repair_report

params = make_params(5, 3)
data = os.urandom(20_000)
cluster = ingest(params, data)
print(f"{cluster.stripes} stripes of {params.k * params.ell} bytes")

before = cluster.shard(2).digest()
cluster.fail(2, 5)
cluster, tr = cluster.repair()
report = repair_report(cluster, tr)
print("optimal:", report["optimal"], "ledger:", report["ledger"])
print("node 2 identical:", cluster.shard(2).digest() == before)

with tempfile.TemporaryDirectory() as d:
    cluster.save(d)
    print(sorted(os.listdir(d)))
    again = Cluster.load(d)
    print("bytes round trip:", again.decode([1, 3, 4]) == data)
