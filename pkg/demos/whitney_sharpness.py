"""Sharpness of the dimension bound: the Whitney map escapes rigidity.

For S_{p,1} -> S_{2p-1,1} the codimension sits exactly at the boundary case
p' - q' = 2(p - q), and the degree-2 Whitney map is a proper CR embedding
that is NOT linear up to automorphisms.  The pipeline reports the failure of
the linear plane structure and exhibits two distinct points with the same
image, which no injective linear model could produce.
"""

import numpy as np

from shilov import (SignatureForm, bound_holds, injectivity_witness,
                    plane_analysis, solve_linear_equivalence, whitney_map)

for p in (2, 3):
    F = SignatureForm(p, 1)
    f = whitney_map(p, 1, 1, 0)
    F2 = SignatureForm(*f.target)
    print(f"\nWhitney map S_{{{p},1}} -> S_{{{2 * p - 1},1}}  "
          f"(p'-q' = {F2.n}, 2(p-q) = {2 * F.n}, "
          f"bound holds: {bound_holds(F, F2)})")

    plane = plane_analysis(f, F, seed=3)
    print(f"image-plane analysis: span {plane.span_dim}, V1 {plane.dim_V1}, "
          f"V2 {plane.dim_V2}; linear pattern expected "
          f"{(F.p + F.q, F2.q - F.q)} -> matches: {plane.expected}")

    eq = solve_linear_equivalence(f, plane, F, count=200)
    print(f"equivalence solver verdict: {eq.status}")

    z1, z2 = injectivity_witness(f, F)
    gap_pts = np.max(np.abs(z1 - z2))
    gap_img = np.max(np.abs(f.evaluate(z1) - f.evaluate(z2)))
    print(f"injectivity witness: |z1 - z2| = {gap_pts:.2f}, "
          f"|f(z1) - f(z2)| = {gap_img:.1e}")
    print("z1^t =", np.round(z1.ravel(), 4), "  z2^t =", np.round(z2.ravel(), 4))
