"""Canonical serialization of verification reports.

Every verifier in this package returns a plain dict

    {"claim": id, "params": {...}, "status": "verified" | "failed",
     "witness": ..., "bounds": {...}}

and this module wraps lists of them in a self-describing, deterministic
envelope: fixed schema tag, the global convention flags that pin the
sign/normalization choices the underlying formulas depend on, and a stable
serialization (sorted keys, fixed separators, no timestamps), so that
identical configurations produce byte-identical JSON.
"""

from __future__ import annotations

import json

SCHEMA = "fgl-forge/1"

# Choices that change the literal formulas being verified; recorded in every
# envelope so a report is interpretable without the producing code.
CONVENTIONS = {
    # the composite of the twisted strict isomorphisms is compared against
    # -[-1]_F(x) (leading coefficient +1), not the raw formal inverse
    "chain-composite": "minus-formal-inverse",
    # t_k^{C_2} is normalized as 2 l_k - sum_{j>=1} gamma(l_j) (t_{k-j})^{2^j}
    "tC2-normalization": "two-l-minus-lower",
}


def envelope(reports, config=None, interrupted=False):
    """Wrap verifier reports (order preserved as given) for serialization."""
    body = {
        "schema": SCHEMA,
        "conventions": dict(CONVENTIONS),
        "reports": list(reports),
        "ok": all(r.get("status") == "verified" for r in reports) and not interrupted,
    }
    if config is not None:
        body["config"] = config
    if interrupted:
        body["interrupted"] = True
    return body


def canonical_json(obj) -> str:
    """Deterministic rendering: sorted keys, fixed separators, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, separators=(",", ": ")) + "\n"


def render_line(report) -> str:
    """One human-readable line per report: status, claim, key parameters."""
    params = report.get("params", {})
    shown = ", ".join(
        f"{k}={params[k]}"
        for k in sorted(params)
        if isinstance(params[k], (int, str, bool))
    )
    mark = "ok " if report.get("status") == "verified" else "FAIL"
    return f"[{mark}] {report.get('claim')}: {shown}"
