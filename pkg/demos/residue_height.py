"""Reading the height off the residue formal group law.

Killing the maximal ideal of W(k)[[tau's]][u^(+-1)] leaves k[u^(+-1)], and the
pushed-forward formal group law has its 2-series supported in degrees that
detect the height: [2](x) = ubar^(2^h - 1) x^(2^h) + higher terms.  This demo
computes that 2-series at three parameter choices, confirms the pinned
(height, coefficient) pairs, and factors the 2-series coefficient ladder into
unit and monomial pieces.

Run:  python3 demos/residue_height.py
"""

from fgl_forge.lubin_tate import (
    KRing,
    LTContext,
    d_factors,
    residue_fgl,
    residue_height,
)
from fgl_forge.series_fgl import two_series

SCENARIOS = [(2, 1, 1), (2, 2, 2), (3, 1, 1)]

for n, m, d in SCENARIOS:
    ctx = LTContext(n, m, d=d)
    h = ctx.h
    print(f"=== (n, m, d) = ({n}, {m}, {d}): expected height h = {h} ===")

    two = two_series(residue_fgl(ctx, cutoff=1 << h))
    lead = min(e for e, c in two.coeffs.items() if not c.is_zero())
    print(f"[2](x) over the residue field starts in degree {lead} = 2^{h}")
    assert lead == 1 << h
    K = KRing(ctx.spec)
    assert two.coeffs[lead] == K.ubar((1 << h) - 1)
    print(f"  leading coefficient = ubar^{(1 << h) - 1}  (a unit: height is exactly {h})")

    report = residue_height(ctx)
    p = report["params"]
    assert p["computed_height"] == h and report["status"] == "verified"
    print(f"  residue_height report: computed_height={p['computed_height']},"
          f" beta={p['beta']}, unit={p['unit']}")
    print()

print("=== the periodicity element factors into norms of level generators ===")
ctx = LTContext(2, 1, d=1)
p = d_factors(ctx)["params"]
for i, (idx, verdict, res) in enumerate(
        zip(p["indices"], p["verdicts"], p["residues"]), start=1):
    (ue, coeffs), = res
    print(f"  factor {i} = norm of the level-2^{i} generator t_{idx}:"
          f" unit={verdict}, residue ubar^{ue}")
print(f"  product is a unit: {p['product_is_unit']}")

print()
print("all checks verified")
