import pytest

from logprism.coeffring import CoeffRing, TruncRing, Var
from logprism.deltalog import (DeltaLogRing, add_units_pushout,
                               adjoin_monoid_dlog, extend_to_group,
                               induced_phi_M, trivial_log_dlog,
                               validate_deltalog)
from logprism.deltaring import DeltaRing
from logprism.errors import NotALogRing, UnsupportedUnits
from logprism.monoids import MonoidPresentation, free_monoid

from conftest import qbase


def free_log_ring(p=2, n=3, depth=2, cap=10):
    R0 = TruncRing(CoeffRing(p, n), [], degree_cap=cap, delta_depth=depth + 1)
    return adjoin_monoid_dlog(DeltaRing(R0), ["x"], depth=depth)


def test_one_generator_presentation():
    # the free log ring on x: phi(x) = x^p (1 + p y0), phi(y_i) = y_i^p + p y_{i+1}
    for p in (2, 3):
        L = free_log_ring(p=p, n=3)
        ring = L.ring
        x, y0, y1 = ring.var("x"), ring.var("y0(x)"), ring.var("y1(x)")
        assert L.phi(x) == x ** p * (ring.one() + p * y0)
        assert L.phi(y0) == y0 ** p + p * y1
        assert L.delta(x) == x ** p * y0
        assert validate_deltalog(L, trials=25)["passed"]


def test_dlog_powers_product_rule():
    L = free_log_ring()
    ring = L.ring
    p = 2
    for k in (2, 3):
        # (1 + p dlog(x))^k = 1 + p dlog(x^k)
        lhs = (ring.one() + p * L.dlog_point((1,))) ** k
        assert p * L.dlog_point((k,)) == lhs - ring.one()


def test_empty_adjunction():
    R0 = TruncRing(CoeffRing(2, 2), [], degree_cap=4, delta_depth=2)
    L = adjoin_monoid_dlog(DeltaRing(R0), [], depth=2)
    assert L.monoid.ambient_rank == 0
    assert validate_deltalog(L, trials=2)["passed"]


def test_nonfree_monoid_needs_cover():
    R0 = TruncRing(CoeffRing(2, 2), [], degree_cap=4, delta_depth=2)
    node = MonoidPresentation(2, [(1, 0), (0, 1), (1, -1)], name="node")
    with pytest.raises(UnsupportedUnits):
        adjoin_monoid_dlog(DeltaRing(R0), None, depth=1, monoid=node)
    # acknowledged free cover: one generator per monoid generator
    L = adjoin_monoid_dlog(DeltaRing(R0), None, depth=1, monoid=node,
                           via_free_cover=True)
    assert L.monoid.ambient_rank == 3


def test_extend_to_group_inverse_formula():
    for p in (2, 3):
        L = free_log_ring(p=p, n=3)
        xZ = MonoidPresentation(1, [(1,), (-1,)], unit_lattice=[(1,)], name="x^Z")
        Lg = extend_to_group(L, xZ, box=6)
        ring = Lg.ring
        y0 = ring.var("y0(x)")
        # dlog(x^{-1}) = -y0/(1 + p y0)
        assert Lg.dlog[1] == -(y0 * (ring.one() + p * y0).invert())
        assert validate_deltalog(Lg, trials=25)["passed"]


def test_extend_idempotent():
    L = free_log_ring()
    xZ = MonoidPresentation(1, [(1,), (-1,)], unit_lattice=[(1,)], name="x^Z")
    L1 = extend_to_group(L, xZ, box=6)
    L2 = extend_to_group(L1, xZ, box=6)
    assert all(a.same(b) for a, b in zip(L1.dlog, L2.dlog))
    assert all(a.same(b) for a, b in zip(L1.alpha, L2.alpha))


def test_rank1_stays_rank1():
    R0 = TruncRing(CoeffRing(2, 3), [Var("u")], degree_cap=6)
    D = DeltaRing(R0, {"u": R0.zero()})
    N = MonoidPresentation(1, [(1,)], facets=[(1,)], name="N")
    L = DeltaLogRing(D, N, [R0.var("u")], [R0.zero()])
    uZ = MonoidPresentation(1, [(1,), (-1,)], unit_lattice=[(1,)], name="u^Z")
    Lg = extend_to_group(L, uZ, box=4)
    assert all(d.is_zero() for d in Lg.dlog)


def test_trivial_log():
    Q, dt = qbase(2, 3, cap=6)
    D = DeltaRing(Q, {"t": dt})
    u = Q.one() + 2 * Q.var("t")
    L = trivial_log_dlog(D, [u, u.invert()])
    assert validate_deltalog(L, trials=25)["passed"]
    assert L.dlog[0] == D.delta(u) * (u.invert() ** 2)
    assert trivial_log_dlog(D, [Q.one()]).dlog[0].is_zero()
    with pytest.raises(UnsupportedUnits):
        trivial_log_dlog(D, [Q.var("t")])


def test_validate_catches_faults():
    L = free_log_ring()
    ring = L.ring
    bad = DeltaLogRing(L.base, L.monoid, list(L.alpha), [L.dlog[0] + ring.one()])
    rep = validate_deltalog(bad, trials=10)
    assert not rep["passed"]
    assert rep["counterexample"] is not None


def test_induced_phi_on_monoid():
    # rank-1: the p-th power map lifts
    R = TruncRing(CoeffRing(2, 3), [], degree_cap=0)
    N = MonoidPresentation(1, [(1,)], facets=[(1,)], name="N")
    L = DeltaLogRing(DeltaRing(R), N, [R.zero()], [R.zero()])
    out = induced_phi_M(L)
    assert out[0]["image"] == (2,)
    assert out[0]["unit_factor"] == R.one()
    assert out[0]["unit_witness"] == []
    # trivial log: alpha(phi_M(u)) = phi(u) at element level
    Q, dt = qbase(2, 3, cap=6)
    D = DeltaRing(Q, {"t": dt})
    u = Q.one() + 2 * Q.var("t")
    Lt = trivial_log_dlog(D, [u])
    outt = induced_phi_M(Lt)
    assert outt[0]["unit_factor"] == D.phi(u) * (u.invert() ** 2)
    # strict log rings demand a monoid witness for the unit factor
    Lt_strict = DeltaLogRing(Lt.base, Lt.monoid, Lt.alpha, Lt.dlog,
                             log_strict=True)
    with pytest.raises(NotALogRing):
        induced_phi_M(Lt_strict)


def test_add_units_pushout():
    L = free_log_ring()
    ring = L.ring
    assert add_units_pushout(L, []) is L
    u = ring.one() + 2 * ring.var("x")
    L1 = add_units_pushout(L, [u])
    assert L1.monoid.ambient_rank == L.monoid.ambient_rank + 1
    assert validate_deltalog(L1, trials=15)["passed"]
    # adjoining u and u^{-1} collapses to one new unit pair
    L2 = add_units_pushout(L, [u, u.invert()])
    assert L2.monoid.ambient_rank == L.monoid.ambient_rank + 1
    assert validate_deltalog(L2, trials=15)["passed"]
    with pytest.raises(UnsupportedUnits):
        add_units_pushout(L, [ring.var("x")])


def test_forced_rank1_reproduces_free_structure():
    # with dlog forced to zero the adjunction gives phi(x) = x^p exactly
    R0 = TruncRing(CoeffRing(3, 2), [Var("x")], degree_cap=9)
    D = DeltaRing(R0, {"x": R0.zero()})
    N = MonoidPresentation(1, [(1,)], facets=[(1,)], name="N")
    L = DeltaLogRing(D, N, [R0.var("x")], [R0.zero()])
    assert L.phi(R0.var("x")) == R0.var("x") ** 3
    assert validate_deltalog(L, trials=10)["passed"]
