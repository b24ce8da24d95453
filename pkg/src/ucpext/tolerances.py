"""Centralized tolerance defaults.

Three tiers, from strict to loose:

  STRUCTURAL  -- symmetry / shape checks on inputs (Hermitian residual, etc.)
  NUMERIC     -- residuals of well-conditioned dense linear algebra
  FEASIBILITY -- user-facing convergence targets of the feasibility solver
"""

STRUCTURAL_TOL = 1e-12
NUMERIC_TOL = 1e-10
FEASIBILITY_TOL = 1e-8
