"""Self-check suites shared by ``coopmsr selftest`` and the demos."""

from __future__ import annotations

from itertools import combinations

import numpy as np

from . import blocks
from .msrcode import erasure_decode, make_params, random_codeword, verify_mds
from .repair import check_optimal, repair

GRIDS = {
    "small": [(4, 2), (5, 3)],
    "full": [(4, 2), (5, 3), (5, 2), (6, 3)],
}


def block_suite(seed: int = 0, trials: int = 20) -> list[dict]:
    rng = np.random.default_rng(seed)
    out = []
    for n in (4, 5, 6):
        for k in range(1, n - 1):
            for kind in ("I", "II"):
                spec = blocks.make_block_spec(kind, n, k)
                mds = blocks.check_mds(spec).ok
                pairs = [(1, 2)] if kind == "I" else list(combinations(range(1, spec.r + 1), 2))
                ok = mds
                for i1, i2 in pairs:
                    for _ in range(trials):
                        c = blocks.random_codeword(spec, rng)
                        if kind == "I":
                            x1, x2, tr = blocks.repair_type1(spec, c)
                        else:
                            x1, x2, tr = blocks.repair_type2(spec, c, i1, i2)
                        ref = blocks.erasure_decode(spec, np.where(
                            np.isin(np.arange(1, n + 1), (i1, i2))[:, None], 0, c), (i1, i2))
                        ok &= bool(np.array_equal(x1, ref[i1 - 1]) and np.array_equal(x2, ref[i2 - 1]))
                        ok &= tr.gamma == 2 * (n - 1) and tr.gamma_a == 2 * (n - 2)
                out.append({"suite": "blocks", "kind": kind, "n": n, "k": k, "ok": bool(ok)})
    return out


def repair_suite(grid: str = "small", seed: int = 0, codewords: int = 4) -> list[dict]:
    rng = np.random.default_rng(seed)
    out = []
    for n, k in GRIDS[grid]:
        params = make_params(n, k)
        mds = verify_mds(params).ok if params.ell <= 8192 else None
        c = random_codeword(params, rng, batch=codewords)
        ok = mds is not False
        for i1, i2 in combinations(range(1, n + 1), 2):
            x1, x2, tr = repair(params, c, i1, i2)
            ref = erasure_decode(params, c, (i1, i2), cache=True)
            ok &= bool(np.array_equal(x1, ref[i1 - 1]) and np.array_equal(x2, ref[i2 - 1]))
            ok &= check_optimal(tr, params).ok
        out.append({"suite": "repair", "n": n, "k": k, "ell": params.ell,
                    "mds": mds, "ok": bool(ok)})
    return out
