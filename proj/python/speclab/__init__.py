# SPDX-License-Identifier: Apache-2.0
"""Spectra of -Laplacian + |xy|^p - lambda (x^2+y^2)^{p/(p+2)}.

Thin wrapper over the compiled ``_speclab`` extension.
"""

from ._speclab import (
    BoundaryKind,
    BracketError,
    ConvergenceError,
    __version__,
    clambda,
    critical_lambda,
    critical_surface,
    cutoff_scan,
    dn_bracket,
    eigenfunction,
    gamma,
    gamma_min,
    gamma_report,
    moment_boundshape,
    moment_sum,
    potential,
    quasimode,
    spectrum,
    truncated_gamma,
)

__all__ = [
    "BoundaryKind",
    "BracketError",
    "ConvergenceError",
    "__version__",
    "clambda",
    "critical_lambda",
    "critical_surface",
    "cutoff_scan",
    "dn_bracket",
    "eigenfunction",
    "gamma",
    "gamma_min",
    "gamma_report",
    "moment_boundshape",
    "moment_sum",
    "potential",
    "quasimode",
    "spectrum",
    "truncated_gamma",
]
