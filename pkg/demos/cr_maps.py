"""Verify the proper-map zoo: standard, Whitney and block-diagonal maps.

Each map is checked for boundary preservation (f(z)*f(z) = I on samples) and
the CR property (the differential sends (1,0) CR vectors to directions that
annihilate the target contact forms).  A deliberately scaled map shows what a
failure looks like.
"""

from shilov import (block_diagonal_map, standard_embedding,
                    verify_boundary_preserving, verify_cr, whitney_map)
from shilov.maps import scaled_map

suite = [
    ("standard (3,2)->(4,3)", standard_embedding(3, 2, 4, 3), True),
    ("classical Whitney p=2", whitney_map(2, 1, 1, 0), True),
    ("matrix Whitney q'=2 m=1", whitney_map(3, 2, 2, 1), True),
    ("matrix Whitney q'=1 (drops a column)", whitney_map(3, 2, 1, 0), False),
    ("block diagonal", block_diagonal_map(
        3, 2, [whitney_map(3, 1, 1, 0), standard_embedding(3, 1, 3, 1)], [0, 1]),
     True),
]

for name, f, immersive in suite:
    bnd = verify_boundary_preserving(f, seed=0, count=500)
    cr = verify_cr(f, seed=1, count=50, require_immersion=immersive)
    sv = cr["min_singular_value"]
    print(f"{name:38s} boundary {bnd['residual']:.1e}  "
          f"cr {cr['cr_residual']:.1e}  sigma_min {sv:.1e}")

print()
bad = scaled_map(standard_embedding(3, 2, 4, 3), 1.1)
rep = verify_boundary_preserving(bad, seed=0, count=100)
print(f"negative control (map scaled by 1.1): boundary residual "
      f"{rep['residual']:.2f} -> {'PASS' if rep['pass'] else 'FAIL'}")
