"""Canonical serialization: sorted keys, decimal-string coefficients,
versioned schema.  Identical inputs must produce identical bytes."""

import json

SCHEMA = "logprism/1"


def key_str(ring, key):
    lat, exps = key
    parts = []
    if any(lat):
        parts.append("L(" + ",".join(str(c) for c in lat) + ")")
    for v, e in zip(ring.vars, exps):
        if e:
            parts.append(f"{v.name}^{e}" if e != 1 else v.name)
    return "*".join(parts) if parts else "1"


def elem_obj(e):
    terms = {key_str(e.ring, k): str(c) for k, c in e.terms.items()}
    return {
        "terms": dict(sorted(terms.items())),
        "precision": e.precision,
        "window": list(e.window),
        "lossy": bool(e.lossy),
    }


def dumps(obj):
    return json.dumps({"schema": SCHEMA, **obj}, sort_keys=True, indent=2) + "\n"


def csv_lines(header, rows):
    out = [",".join(header)]
    for row in rows:
        out.append(",".join(str(x) for x in row))
    return "\n".join(out) + "\n"


def cohomology_rows(tables):
    """CSV rows: degree, free_rank, torsion divisors (semicolon-joined)."""
    rows = []
    for deg in sorted(tables):
        t = tables[deg]
        rows.append((deg, t.get("free_rank", ""),
                     ";".join(str(x) for x in t.get("torsion", [])),
                     t.get("expected", ""), t.get("match", "")))
    return rows
