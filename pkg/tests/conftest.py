import random
import sys
from math import comb
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from logprism.coeffring import Cap, CoeffRing, TruncRing, Var
from logprism.deltaring import DeltaRing


def qbase(p, n, cap, extra=(), depth=2, label="qbase"):
    ring = TruncRing(CoeffRing(p, n), (Var("t"),) + tuple(extra),
                     degree_cap=cap, delta_depth=depth, label=label)
    dt = ring.zero()
    for i in range(1, p):
        dt = dt + ring.var("t", e=i, c=comb(p, i) // p)
    return ring, dt


def rand_elem(ring, rng, names=None, terms=3, deg=3):
    names = names or [v.name for v in ring.vars]
    out = ring.zero()
    for _ in range(terms):
        c = rng.randint(0, ring.coeff.pn - 1)
        if names and rng.random() < 0.8:
            nm = rng.choice(names)
            out = out + ring.var(nm, e=rng.randint(1, deg), c=c)
        else:
            out = out + ring.const(c)
    return out


@pytest.fixture
def rng():
    return random.Random(20260808)
