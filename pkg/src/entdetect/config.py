"""Central numerical tolerances shared across the package.

Every module reads its thresholds from one `Tolerances` record so the whole
stack can be retuned from a single place.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    # matrix-level checks
    hermiticity: float = 1e-12      # entrywise |H - H^dag|
    psd_floor: float = -1e-9        # smallest admissible eigenvalue of a state
    trace_one: float = 1e-10        # |Tr(rho) - 1|
    # solver targets
    sdp_feas: float = 1e-8          # primal/dual residual target
    sdp_gap: float = 1e-7           # duality-gap target
    sdp_cert: float = 1e-7          # certificate re-verification slack
    tau_kappa: float = 1e-8         # feasible/infeasible ratio threshold
    # detection layer
    block_positivity: float = 1e-7  # separation-oracle acceptance level
    certify_margin: float = -1e-9   # witness value + bar must be below this
    npt_margin: float = -1e-9       # partial-transpose eigenvalue cutoff


DEFAULT_TOL = Tolerances()
