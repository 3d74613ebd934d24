"""Repair two failed nodes of the (5, 2, 3^8) code and compare with a naive rebuild."""

import numpy as np

from coopmsr import make_params
from coopmsr.msrcode import erasure_decode, random_codeword
from coopmsr.repair import check_optimal, plan, repair

params = make_params(5, 2)
print(f"(n,k)=({params.n},{params.k}) ell={params.ell} bounds={params.bounds()}")
c = random_codeword(params, np.random.default_rng(0))

for pair in [(1, 2), (1, 4), (4, 5)]:
    pl = plan(params, *pair)
    x1, x2, tr = repair(params, c, *pair)
    verdict = check_optimal(tr, params)
    print(pair, pl.describe(), "rounds:", tr.rounds,
          "gamma:", tr.gamma, "gamma_a:", tr.gamma_a, "optimal:", verdict.ok,
          "correct:", np.array_equal(x1, c[pair[0] - 1]) and np.array_equal(x2, c[pair[1] - 1]))

# rebuilding each node from k full helpers moves 2 * k * ell symbols
naive = 2 * params.k * params.ell
print(f"naive rebuild: {naive} symbols, cooperative: {params.bounds()['gamma']}")

# the decoder agrees with the repair on a different pair
lost = c.copy()
lost[[1, 2]] = 0
assert np.array_equal(erasure_decode(params, lost, (2, 3)), c)
