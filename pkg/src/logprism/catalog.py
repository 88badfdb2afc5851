"""Named desk-scale instances shared by the CLI and the test suite.

Every builder takes explicit size parameters so reports can name their
windows; defaults are the sizes the acceptance suite pins.
"""

from math import comb

from . import monoids as MO
from .coeffring import Cap, CoeffRing, TruncRing, Var
from .deltalog import DeltaLogRing
from .deltaring import DeltaRing
from .monoids import MonoidMap, MonoidPresentation
from .prisms import PrismTriple, make_example, validate_prism
from .qderham import GammaAction


# -- monoid map catalog (10 maps) ------------------------------------------------


def monoid_catalog():
    """Named monoid maps with their expected predicate verdicts (the
    exhaustive-oracle answers at bound 12)."""
    N1 = MO.free_monoid(1)
    N2 = MO.free_monoid(2)
    triv = MO.trivial_monoid()
    m23 = MO.numeric_monoid([2, 3])
    Zm = MonoidPresentation(1, [(1,), (-1,)], unit_lattice=[(1,)], name="Z")
    diag_img = MonoidPresentation(2, [(1, 1)], name="<(1,1)>")
    entries = {
        "identity": {
            "map": MonoidMap(N1, N1, [[1]], name="identity"),
            "exact": "yes", "integral": "yes", "cartier": {2: "yes", 3: "yes"},
        },
        "diag": {
            "map": MonoidMap(N1, N2, [[1], [1]], name="diag"),
            "exact": "yes", "integral": "yes", "cartier": {2: "yes", 3: "yes"},
        },
        "trivial-to-line": {
            "map": MonoidMap(triv, N1, [[]], name="trivial-to-line"),
            "exact": "yes", "integral": "yes", "cartier": {2: "yes", 3: "yes"},
        },
        "sum": {
            "map": MonoidMap(N2, N1, [[1, 1]], name="sum"),
            "exact": "no", "integral": "no", "cartier": {},
        },
        "double": {
            # ramified: the relative Frobenius image <2,3> in N is not exact
            "map": MonoidMap(N1, N1, [[2]], name="double"),
            "exact": "yes", "integral": "yes", "cartier": {3: "no"},
            "pushout_torsion_at": [2],
        },
        "numeric-embed": {
            "map": MonoidMap(m23, N1, [[1]], name="numeric-embed"),
            "exact": "no", "integral": "no", "cartier": {},
        },
        "axis": {
            "map": MonoidMap(N1, N2, [[1], [0]], name="axis"),
            "exact": "yes", "integral": "yes", "cartier": {2: "yes", 3: "yes"},
        },
        "group-line": {
            "map": MonoidMap(Zm, Zm, [[1]], name="group-line", valuative_src=True),
            "exact": "yes", "integral": "yes", "cartier": {2: "yes", 3: "yes"},
        },
        "project": {
            "map": MonoidMap(N2, N1, [[1, 0]], name="project"),
            "exact": "no", "integral": "yes", "cartier": {},
        },
        "diag-image": {
            "map": MonoidMap(diag_img, N2, [[1, 0], [0, 1]], name="diag-image"),
            "exact": "yes", "integral": "yes", "cartier": {2: "yes", 3: "yes"},
        },
    }
    return entries


# -- prism bases -----------------------------------------------------------------


def base_prism(name, p, n, cap=None, depth=2):
    if name == "crystalline":
        return make_example("crystalline", p, n)
    if name == "breuil-kisin":
        return make_example("breuil_kisin", p, n, cap=cap, depth=depth)
    if name == "qdr":
        return make_example("qdr", p, n, cap=cap, depth=depth)
    if name == "universal-oriented":
        return make_example("universal_oriented", p, n, cap=cap, depth=depth)
    raise KeyError(name)


# -- q-de Rham instances -----------------------------------------------------------


def qline(p, n, x_cap=None, t_cap=None, depth=2):
    """The log-affine line over the q-base: carrier D[x] with gamma(x) = qx."""
    x_cap = 10 * p if x_cap is None else x_cap
    t_cap = 2 * p if t_cap is None else t_cap
    ring = TruncRing(CoeffRing(p, n), [Var("t"), Var("x")],
                     caps=[Cap((), (1, 0), t_cap), Cap((), (0, 1), x_cap)],
                     delta_depth=depth, label=f"qline({p},{n})")
    dt = ring.zero()
    for i in range(1, p):
        dt = dt + ring.var("t", e=i, c=comb(p, i) // p)
    base = DeltaRing(ring, {"t": dt, "x": ring.zero()})
    prelog = MonoidPresentation(1, [(1,)], facets=[(1,)], name="N")
    log = DeltaLogRing(base, prelog, [ring.var("x")], [ring.zero()])
    gam = GammaAction(ring, var_w={"x": 1}, label="x")
    return log, [gam], ["dlog x"]


NODE_MONOID = MonoidPresentation(2, [(1, 0), (0, 1), (1, -1)],
                                 facets=[(1, 0), (1, 1)], name="node")


def qnode(p, n, deg_cap=None, t_cap=None, depth=2):
    """The semistable node over the q-base with the standard log point:
    carrier D[x, y]/(xy = 0) with gamma(x) = qx, gamma(y) = q^{-1} y."""
    deg_cap = 4 * p if deg_cap is None else deg_cap
    t_cap = 2 * p if t_cap is None else t_cap
    ring = TruncRing(CoeffRing(p, n), [Var("t")],
                     lat_rank=2, lat_weights=(2, 1),
                     lat_boxes=(deg_cap, deg_cap), lat_monoid=NODE_MONOID,
                     caps=[Cap((0, 0), (1,), t_cap), Cap((2, 1), (0,), deg_cap)],
                     kill=[(1, 0)], delta_depth=depth, label=f"qnode({p},{n})")
    dt = ring.zero()
    for i in range(1, p):
        dt = dt + ring.var("t", e=i, c=comb(p, i) // p)
    base = DeltaRing(ring, {"t": dt})   # lattice part rank 1: delta = 0 on it
    # prelog: the node chart N^2 (x, y) over the base point m = xy |-> 0
    prelog = MonoidPresentation(2, [(0, 1), (1, -1)], name="node chart")
    log = DeltaLogRing(base, prelog, [ring.lat((0, 1)), ring.lat((1, -1))],
                       [ring.zero(), ring.zero()])
    gam = GammaAction(ring, lat_w=(0, 1), label="x")
    return log, [gam], ["dlog x"]


def classical_line(p, n, x_cap=None):
    x_cap = 10 * p if x_cap is None else x_cap
    ring = TruncRing(CoeffRing(p, n), [Var("x")], degree_cap=x_cap,
                     label=f"line({p},{n})")
    return ring, [((), {"x": 1})], ["dlog x"]


def classical_node(p, n, deg_cap=None):
    deg_cap = 4 * p if deg_cap is None else deg_cap
    ring = TruncRing(CoeffRing(p, n), [],
                     lat_rank=2, lat_weights=(2, 1),
                     lat_boxes=(deg_cap, deg_cap), lat_monoid=NODE_MONOID,
                     caps=[Cap((2, 1), (), deg_cap)], kill=[(1, 0)],
                     label=f"node({p},{n})")
    return ring, [((0, 1), {})], ["dlog x"]


def charp_node_chart(p, deg_cap=None):
    """The full monoid algebra F_p[N^2] over F_p[N] (no kill): the chart used
    by the characteristic-p Cartier check."""
    deg_cap = 6 * p if deg_cap is None else deg_cap
    N2 = MO.free_monoid(2)
    ring = TruncRing(CoeffRing(p, 1), [], lat_rank=2, lat_weights=(1, 1),
                     lat_boxes=(deg_cap, deg_cap), lat_monoid=N2,
                     caps=[Cap((1, 1), (), deg_cap)], label=f"nodechart({p})")
    functionals = [((1, -1), {})]
    return ring, functionals, ["dlog x"]


def catalog_entries():
    """CLI-facing list of named instances."""
    return {
        "crystalline": {"kind": "base", "summary": "Z/p^n with d = p and the "
                        "rank-1 point N -> 0"},
        "breuil-kisin": {"kind": "base", "summary": "Z/p^n[[u]] with d = u - p, "
                         "frobenius u -> u^p, prelog N -> u"},
        "qdr": {"kind": "base", "summary": "Z/p^n[[q-1]] with d = [p]_q and "
                "delta(q) = 0"},
        "universal-oriented": {"kind": "base", "summary": "free delta-ring on d "
                               "with delta(d) inverted as a formal unit"},
        "affine-line": {"kind": "chart", "summary": "one free coordinate, no "
                        "extra log; the Cech window instance"},
        "log-affine-line": {"kind": "chart", "summary": "one log coordinate "
                            "with dlog basis; gamma(x) = qx"},
        "semistable-node": {"kind": "chart", "summary": "chart N -> N^2 "
                            "(diagonal); xy = 0 over the log point"},
        "monoid-catalog": {"kind": "monoids", "summary": "ten maps with "
                           "pinned exact/integral/Cartier verdicts"},
        "appxb-line": {"kind": "cosimplicial", "summary": "levels k[Q + G^n] "
                       "for Q = N over the trivial monoid"},
        "appxb-node": {"kind": "cosimplicial", "summary": "levels for the "
                       "diagonal chart N -> N^2"},
        "redundant-chart-line": {"kind": "envelope", "summary": "the line "
                                 "presented with two coordinates; q-PD "
                                 "envelope of the difference"},
    }
