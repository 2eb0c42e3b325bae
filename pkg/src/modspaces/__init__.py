"""Numerical toolkit for weighted modulation spaces.

Subpackages:
  weights    - subexponential weight families, critical constants,
               inequality sweeps
  partition  - smooth frequency-uniform partition of unity
  modspace   - sampled functions, decomposition and STFT norms,
               algebra checks
  constants  - tail constants, incomplete-gamma kernel, radius solver
  specialfn  - compactly supported smooth exemplars and their spectra
  superpose  - composition operators u -> f(u) and their norm bounds
  cli        - command line front end ("python -m modspaces ...")
"""

from .weights import (
    WeightSpec,
    WeightAnalysis,
    VerificationReport,
    analyze_weight,
    bracket_star,
    w_star,
    weight_eval,
)

__version__ = "0.1.0"

__all__ = [
    "WeightSpec",
    "WeightAnalysis",
    "VerificationReport",
    "analyze_weight",
    "bracket_star",
    "w_star",
    "weight_eval",
    "__version__",
]
