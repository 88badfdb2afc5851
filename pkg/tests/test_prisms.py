import pytest

from logprism.coeffring import (Cap, CoeffRing, TruncRing, Var, divide_exact,
                                transport)
from logprism.deltalog import DeltaLogRing, validate_deltalog
from logprism.deltaring import DISTINGUISHED, DeltaRing
from logprism.errors import BadEisenstein, NotDivisible, NotRegular
from logprism.homalg import RingHom
from logprism.monoids import MonoidMap, MonoidPresentation, free_monoid, is_exact
from logprism.prisms import (exactify_triple, gamma, make_example,
                             nonzerodivisor_certificate, pd_envelope, pq_of,
                             prismatic_envelope_regular, q_of, qpd_certificates,
                             qpd_envelope, validate_prism)

from conftest import qbase


def test_validate_prism_examples():
    for p in (2, 3, 5):
        for n in (2, 3):
            T = make_example("crystalline", p, n)
            assert T.report["passed"], (p, n, T.report["failures"])
            assert T.report["distinguished"] == DISTINGUISHED
    T = make_example("breuil_kisin", 2, 3)
    assert T.report["passed"]
    a, b = T.report["p_in_ideal"]["a"], T.report["p_in_ideal"]["b"]
    assert a * T.d + b * T.log.phi(T.d) == T.ring.const(2)
    assert make_example("qdr", 3, 2, cap=9).report["passed"]
    assert make_example("universal_oriented", 2, 2, cap=4).report["passed"]


def test_bad_eisenstein():
    with pytest.raises(BadEisenstein):
        make_example("breuil_kisin", 2, 3, eisenstein=[1, 1])
    with pytest.raises(BadEisenstein):
        make_example("breuil_kisin", 2, 3, eisenstein=[-2, 1, 2])
    with pytest.raises(BadEisenstein):
        make_example("breuil_kisin", 2, 3, eisenstein=[-4, 0, 1])


def test_nonzerodivisor_rejects_zero_divisor():
    node = MonoidPresentation(2, [(1, 0), (0, 1), (1, -1)],
                              facets=[(1, 0), (1, 1)], name="node")
    R = TruncRing(CoeffRing(2, 2), [], lat_rank=2, lat_weights=(2, 1),
                  lat_boxes=(6, 6), lat_monoid=node, degree_cap=6,
                  kill=[(1, 0)])
    ok, det = nonzerodivisor_certificate(R, R.lat((1, 1)))
    assert not ok and det["kernel_violations"]


def test_gamma_examples():
    p = 3
    T = make_example("qdr", p, 2, cap=9)
    ring = T.ring
    t = ring.var("t")
    # gamma(q-1) = (q-1) - delta(q-1)
    assert gamma(T.log, t) == t - T.log.delta(t)
    assert gamma(T.log, ring.zero()) == ring.zero()
    # product formula gamma(f x) = phi(f) gamma(x) - x^p delta(f)
    f = ring.one() + 2 * t + t * t
    assert gamma(T.log, f * t) == \
        T.log.phi(f) * gamma(T.log, t) - t ** p * T.log.delta(f)
    with pytest.raises(NotDivisible):
        gamma(T.log, ring.one())    # phi(1) = 1 not in ([p]_q)


def _plain_log(ring, dgen):
    return DeltaLogRing(DeltaRing(ring, dgen), MonoidPresentation(0, []), [], [])


def test_pd_envelope():
    R = TruncRing(CoeffRing(2, 2), [Var("x")], degree_cap=8)
    L = _plain_log(R, {"x": R.zero()})
    env = pd_envelope(L, ["x"], 4)
    r2 = env.ring
    gx = lambda k: r2.var("g[x]", e=k)
    x = env.hom(R.var("x"))
    assert x == gx(1)
    assert x * x == 2 * gx(2)                       # x^2 = 2! gamma_2
    assert gx(2) * gx(2) == 6 * gx(4)               # C(4,2) gamma_4
    assert x ** 3 == 6 * gx(3) == 2 * gx(3)         # 3! = 6 = 2 mod 4
    # mod p: x^p = 0 while gamma_p survives
    assert (x ** 2).at_precision(1).is_zero()
    assert not gx(2).at_precision(1).is_zero()
    # beyond the cap the divided tower truncates silently
    assert gx(4) * gx(1) == r2.zero() and (gx(4) * gx(1)).lossy
    assert pd_envelope(L, [], 4).ring is R


def test_qpd_envelope_depth1():
    p, n = 2, 3
    ring = TruncRing(CoeffRing(p, n), [Var("t"), Var("x"), Var("z")],
                     degree_cap=6, delta_depth=2)
    from math import comb
    dt = ring.zero()
    for i in range(1, p):
        dt = dt + ring.var("t", e=i, c=comb(p, i) // p)
    L = _plain_log(ring, {"t": dt, "x": ring.zero(), "z": ring.zero()})
    env0 = qpd_envelope(L, [], depth=1)
    assert env0.ring is ring                         # (q-1) is already q-PD
    env = qpd_envelope(L, ["z"], depth=1)
    r2 = env.ring
    z, g1 = r2.var("z"), r2.var("g1(z)")
    pq = pq_of(r2)
    assert z ** p == pq * g1                         # delta(z) = 0
    assert divide_exact(env.log.phi(z), pq, declared=True) == g1
    assert gamma(env.log, z, pq) == g1
    cert = qpd_certificates(env, [r2.var("t"), z, g1])
    assert cert["passed"], cert["items"]


def test_qpd_envelope_depth2_gamma_tower():
    p, n = 2, 3
    ring = TruncRing(CoeffRing(p, n), [Var("t"), Var("z")],
                     degree_cap=6, delta_depth=2)
    from math import comb
    dt = ring.zero()
    for i in range(1, p):
        dt = dt + ring.var("t", e=i, c=comb(p, i) // p)
    L = _plain_log(ring, {"t": dt, "z": ring.zero()})
    env = qpd_envelope(L, ["z"], depth=2)
    r2 = env.ring
    pq = pq_of(r2)
    g1, g2 = r2.var("g1(z)"), r2.var("g2(z)")
    assert gamma(env.log, r2.var("z"), pq) == g1
    assert gamma(env.log, g1, pq) == g2
    cert = qpd_certificates(env, [r2.var("t"), r2.var("z"), g1, g2,
                                  r2.var("s1(z)")])
    assert cert["passed"], cert["items"]


def test_qpd_reduction_matches_pd_envelope():
    # q -> 1: z^p -> p g1, so g1 corresponds to (p-1)! gamma_p(z); the window
    # bases match term-exactly under that correspondence
    from math import factorial
    for p in (2, 3):
        n = 2
        ringq = TruncRing(CoeffRing(p, n), [Var("t"), Var("z")],
                          caps=[Cap((), (1, 0), p - 1 and p), Cap((), (0, 1), 2 * p)],
                          delta_depth=1)
        from math import comb
        dt = ringq.zero()
        for i in range(1, p):
            dt = dt + ringq.var("t", e=i, c=comb(p, i) // p)
        Lq = _plain_log(ringq, {"t": dt, "z": ringq.zero()})
        envq = qpd_envelope(Lq, ["z"], depth=1)
        # reduced ring: drop t, keep the rewrite z^p -> p g1
        ringr = TruncRing(CoeffRing(p, n), [Var("z"), Var("g1(z)", weight=p)],
                          degree_cap=2 * p)
        ringr.set_rewrite("z", p, ringr.var("g1(z)", c=p))
        # pd side
        ringc = TruncRing(CoeffRing(p, n), [Var("z")], degree_cap=2 * p)
        Lc = _plain_log(ringc, {"z": ringc.zero()})
        envc = pd_envelope(Lc, ["z"], pd_cap=2 * p)
        rc = envc.ring
        corr = RingHom(ringr, rc,
                       {"z": rc.var("g[z]"),
                        "g1(z)": rc.var("g[z]", e=p, c=factorial(p - 1))},
                       None, name="corr")
        # ring-hom property across the rewrite: z^p maps consistently
        lhs = corr(ringr.var("z")) ** p
        rhs = corr(ringr.var("z", e=1) ** p)
        assert lhs == rhs
        # basis correspondence (e, k) <-> gamma_{e + pk} is bijective on windows
        basis_q = [k for k in ringr.window_basis() ]
        basis_c = [k for k in rc.window_basis()]
        imgs = set()
        for (lat, exps) in basis_q:
            e, k = exps
            imgs.add(e + p * k)
        want = {exps[0] for (lat, exps) in basis_c}
        assert imgs == want


def test_prismatic_envelope_regular():
    T = make_example("crystalline", 2, 2)
    ring0 = TruncRing(T.ring.coeff,
                      [Var(nm, weight=2 ** i) for nm, i in
                       [("x0", 0), ("d1(x0)", 1), ("d2(x0)", 2),
                        ("x1", 0), ("d1(x1)", 1), ("d2(x1)", 2)]],
                      degree_cap=8, delta_depth=2)
    D0 = DeltaRing(ring0, {
        "x0": ring0.var("d1(x0)"), "d1(x0)": ring0.var("d2(x0)"), "d2(x0)": None,
        "x1": ring0.var("d1(x1)"), "d1(x1)": ring0.var("d2(x1)"), "d2(x1)": None})
    L0 = DeltaLogRing(D0, T.log.monoid, [ring0.zero()], [ring0.zero()])
    env = prismatic_envelope_regular(L0, ring0.const(2),
                                     [("x1", ring0.var("x0"))], depth=2)
    r2 = env.ring
    y = r2.var("y(x1)")
    img = env.hom(ring0.var("x1"))
    assert img == r2.var("x0") + 2 * y
    # the eliminated tower is the delta of the defining image
    assert env.hom(ring0.var("d1(x1)")) == env.log.base.delta(img)
    assert env.hom(ring0.var("d2(x1)")) == \
        env.log.base.delta(env.log.base.delta(img))
    # gens already inside (d): unchanged
    assert prismatic_envelope_regular(L0, ring0.const(2), [], depth=2).ring \
        is ring0


def test_prismatic_envelope_base_change():
    # crystalline(2,3) -> crystalline(2,2): build then reduce equals reduce
    # then build, on the matching generators
    envs = {}
    for n in (3, 2):
        T = make_example("crystalline", 2, n)
        ring0 = TruncRing(T.ring.coeff,
                          [Var(nm, weight=2 ** i) for nm, i in
                           [("x0", 0), ("d1(x0)", 1), ("x1", 0), ("d1(x1)", 1)]],
                          degree_cap=6, delta_depth=1)
        D0 = DeltaRing(ring0, {"x0": ring0.var("d1(x0)"), "d1(x0)": None,
                               "x1": ring0.var("d1(x1)"), "d1(x1)": None})
        L0 = DeltaLogRing(D0, T.log.monoid, [ring0.zero()], [ring0.zero()])
        envs[n] = prismatic_envelope_regular(L0, ring0.const(2),
                                             [("x1", ring0.var("x0"))], depth=1)
    hi = envs[3].log.base.delta_gen["y(x1)"]
    lo = envs[2].log.base.delta_gen["y(x1)"]
    mod = 2 ** min(hi.precision, lo.precision)
    assert {k: c % mod for k, c in hi.terms.items() if c % mod} == \
        {k: c % mod for k, c in lo.terms.items() if c % mod}


def test_exactify_triple():
    N2, N1 = free_monoid(2), free_monoid(1)
    summ = MonoidMap(N2, N1, [[1, 1]], name="sum")
    R = TruncRing(CoeffRing(2, 2), [Var("X"), Var("Y")], degree_cap=6)
    D = DeltaRing(R, {"X": R.zero(), "Y": R.zero()})
    L = DeltaLogRing(D, N2, [R.var("X"), R.var("Y")], [R.zero(), R.zero()])
    log2, ideal2, mprime, hprime = exactify_triple(L, [R.const(2)], summ)
    assert is_exact(hprime, 6).value == "yes"
    # A' gains (X/Y)^{+-1}: the new generator directions are single monomials
    idx = list(mprime.generators).index((1, -1))
    assert len(log2.alpha[idx].terms) == 1
    assert validate_deltalog(log2, trials=10)["passed"]
    # rank-1 in, rank-1 out
    assert all(d.is_zero() for d in log2.dlog)
