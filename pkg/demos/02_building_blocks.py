"""The two ell = r array codes, repaired by hand-sized transcripts."""

import numpy as np

from coopmsr import blocks

rng = np.random.default_rng(1)

t1 = blocks.make_block_spec("I", 6, 3)
print(blocks.parity_matrix(t1)[:3, :6])  # t = 1 rows for nodes 1 and 2
print("Type-I MDS:", blocks.check_mds(t1).ok)

c = blocks.random_codeword(t1, rng)
x1, x2, tr = blocks.repair_type1(t1, c)
print("nodes 1,2 back:", np.array_equal(x1, c[0]), np.array_equal(x2, c[1]))
print(f"bandwidth {tr.gamma} = 2(n-1), access {tr.gamma_a} = 2(n-2)")

t2 = blocks.make_block_spec("II", 6, 3)
c = blocks.random_codeword(t2, rng)
for pair in [(1, 2), (1, 3), (2, 3)]:
    y1, y2, tr = blocks.repair_type2(t2, c, *pair)
    ok = np.array_equal(y1, c[pair[0] - 1]) and np.array_equal(y2, c[pair[1] - 1])
    print(pair, ok, tr.gamma, tr.gamma_a)

try:
    blocks.repair_type2(t2, c, 1, 4)
except blocks.UnsupportedPattern as exc:
    print("as expected:", exc)
