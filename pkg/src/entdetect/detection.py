"""Entanglement certification from partial measurement data.

Three decision routes over a growing measurement record:

* ``ppt_compatible``     -- feasibility of a PPT state matching the data
  (optionally with fixed marginals); infeasibility certifies entanglement.
* ``reconstruct_state``  -- the data-compatible state maximizing the smallest
  eigenvalue (no positivity condition on the partial transpose).
* ``optimal_witness`` / ``witness_estimate`` -- a unit-trace block-positive
  operator minimizing its expectation on the reconstruction, built by cutting
  planes over product states, and the resulting estimate with an error bar
  from the unmeasured component.

``sequential_detect`` runs any of the three step by step over a measurement
ordering, latching the first certification.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT_TOL
from .linalg import (Dims, herm_coords, herm_from_coords, hermitian_basis,
                     hermitize, hs_inner, kron, min_eig, partial_trace,
                     partial_transpose)
from .observables import MeasurementRecord
from .sdp import (SdpProblem, SdpVerdict, SolverParams, embed_hermitian,
                  solve, unembed_hermitian)


class ContradictoryRecordError(ValueError):
    """Measurement record admits no quantum state at all."""


class WitnessUnconvergedError(RuntimeError):
    """Cutting-plane loop exhausted its budget without certifying the witness."""


# ---------------------------------------------------------------------------
# Problem builders (complex data -> real embedded SDPs)
# ---------------------------------------------------------------------------


def _data_rows(record: MeasurementRecord) -> list[tuple[np.ndarray, float]]:
    return [(record.basis.ops[k], v) for k, v in record.entries]


def _marginal_rows(dims: Dims, marginals: tuple[np.ndarray, np.ndarray]
                   ) -> list[tuple[np.ndarray, float]]:
    """One constraint per local Hermitian basis direction of each marginal.

    The handful of rows redundant with the global trace or with measured local
    directions are dropped again by the solver presolve.
    """
    da, db = dims
    rho_a, rho_b = marginals
    rows = []
    for g in hermitian_basis(da):
        rows.append((kron(g, np.eye(db)), hs_inner(rho_a, g)))
    for g in hermitian_basis(db):
        rows.append((kron(np.eye(da), g), hs_inner(rho_b, g)))
    return rows


def build_ppt_feasibility(record: MeasurementRecord, dims: Dims,
                          marginals: tuple[np.ndarray, np.ndarray] | None = None
                          ) -> SdpProblem:
    """Feasibility program: rho PSD, unit trace, PSD partial transpose, data
    equalities, optionally fixed marginals.  Blocks: (rho, rho^PT), embedded."""
    da, db = dims
    d = da * db
    eq: list[tuple[list[np.ndarray | None], float]] = []
    eq.append(([embed_hermitian(np.eye(d)), None], 2.0))
    for bmat in hermitian_basis(d):
        eq.append(([-embed_hermitian(partial_transpose(bmat, dims)),
                    embed_hermitian(bmat)], 0.0))
    for op, val in _data_rows(record):
        eq.append(([embed_hermitian(op), None], 2.0 * val))
    if marginals is not None:
        for op, val in _marginal_rows(dims, marginals):
            eq.append(([embed_hermitian(op), None], 2.0 * val))
    return SdpProblem(blocks=[2 * d, 2 * d], eq=eq)


def build_reconstruction(record: MeasurementRecord, dims: Dims,
                         marginals: tuple[np.ndarray, np.ndarray] | None = None
                         ) -> SdpProblem:
    """Max-min-eigenvalue completion: rho = Y + t I with Y PSD, t >= 0 maximized."""
    da, db = dims
    d = da * db
    eq: list[tuple[list[np.ndarray | None], float]] = []
    eq.append(([embed_hermitian(np.eye(d)), np.array([[2.0 * d]])], 2.0))
    for op, val in _data_rows(record):
        eq.append(([embed_hermitian(op), np.array([[2.0 * np.trace(op).real]])], 2.0 * val))
    if marginals is not None:
        for op, val in _marginal_rows(dims, marginals):
            eq.append(([embed_hermitian(op), np.array([[2.0 * np.trace(op).real]])], 2.0 * val))
    return SdpProblem(blocks=[2 * d, 1], eq=eq, obj=[None, np.array([[-1.0]])])


def build_witness_problem(rho: np.ndarray, dims: Dims,
                          cuts: list[tuple[np.ndarray, np.ndarray]],
                          kappa: float) -> SdpProblem:
    """Witness program: minimize Tr(W rho) with Tr(W) = 1 over

        W = P + PT(Q) + R,   P, Q PSD,   R >= -kappa I,
        Tr(W |ab><ab|) >= 0  for the current product-state cuts.

    P + PT(Q) spans the decomposable operators, which are automatically
    nonnegative on products; the caged remainder R carries any
    non-decomposable excess and is kept honest by the cuts.  Blocks are
    (P, Q, S) with S = R + kappa I; the fixed total trace makes the feasible
    set compact, so no upper eigenvalue bound is needed.
    """
    da, db = dims
    d = da * db
    ident = embed_hermitian(np.eye(d))
    eq = [([ident, ident, ident], 2.0 * (1.0 + kappa * d))]
    ineq = []
    for a, b in cuts:
        v = kron(a, b)
        proj = np.outer(v, v.conj())
        ineq.append(([embed_hermitian(proj),
                      embed_hermitian(partial_transpose(proj, dims)),
                      embed_hermitian(proj)], 2.0 * kappa))
    obj = [embed_hermitian(rho) / 2.0,
           embed_hermitian(partial_transpose(rho, dims)) / 2.0,
           embed_hermitian(rho) / 2.0]
    return SdpProblem(blocks=[2 * d, 2 * d, 2 * d], eq=eq, ineq=ineq, obj=obj)


# ---------------------------------------------------------------------------
# PPT compatibility and state reconstruction
# ---------------------------------------------------------------------------


@dataclass
class PptCompatibility:
    status: str  # Compatible | NoPptState | Indeterminate
    state: np.ndarray | None
    verdict: SdpVerdict


def ppt_compatible(record: MeasurementRecord, dims: Dims,
                   marginals: tuple[np.ndarray, np.ndarray] | None = None,
                   params: SolverParams | None = None,
                   sink=None) -> PptCompatibility:
    """Decide whether some PPT state reproduces the recorded data.

    ``NoPptState`` certifies entanglement of any state behind the data (and is
    only emitted on a verified infeasibility certificate); solver failures
    surface as ``Indeterminate``, never as a detection.
    """
    problem = build_ppt_feasibility(record, dims, marginals)
    verdict = solve(problem, params)
    if sink is not None:
        sink("ppt-feasibility" if marginals is None else "ppt-feasibility-marginals",
             problem, verdict)
    if verdict.status == "Feasible":
        d = dims[0] * dims[1]
        rho = hermitize(unembed_hermitian(verdict.point[0]))
        rho = rho / np.trace(rho).real
        return PptCompatibility(status="Compatible", state=rho, verdict=verdict)
    if verdict.status == "Infeasible":
        return PptCompatibility(status="NoPptState", state=None, verdict=verdict)
    return PptCompatibility(status="Indeterminate", state=None, verdict=verdict)


def reconstruct_state(record: MeasurementRecord, dims: Dims,
                      marginals: tuple[np.ndarray, np.ndarray] | None = None,
                      params: SolverParams | None = None,
                      sink=None) -> np.ndarray:
    """Data-compatible state maximizing the smallest eigenvalue."""
    problem = build_reconstruction(record, dims, marginals)
    verdict = solve(problem, params)
    if sink is not None:
        sink("reconstruction", problem, verdict)
    if verdict.status == "Infeasible":
        raise ContradictoryRecordError("no state matches the measurement record")
    if verdict.status != "Optimal":
        raise RuntimeError(f"reconstruction solve ended with {verdict.status}")
    d = dims[0] * dims[1]
    t = float(verdict.point[1][0, 0])
    rho = hermitize(unembed_hermitian(verdict.point[0])) + t * np.eye(d)
    return rho / np.trace(rho).real


# ---------------------------------------------------------------------------
# Witness construction (cutting planes over product states)
# ---------------------------------------------------------------------------


@dataclass
class WitnessParams:
    kappa: float = 0.5           # eigenvalue cage on the non-decomposable part
    kappa_doublings: int = 3
    max_rounds: int = 100
    oracle_restarts: int = 20
    oracle_sweeps: int = 500
    oracle_tol: float = 1e-10
    bp_tol: float = DEFAULT_TOL.block_positivity
    cuts_per_round: int = 16
    seed: int = 1234


@dataclass
class Witness:
    """Unit-trace block-positive operator with its active product-state cuts."""

    operator: np.ndarray
    dims: Dims
    value: float  # Tr(W rho) on the state it was optimized for
    support_states: list[tuple[np.ndarray, np.ndarray]] = field(default_factory=list)
    cuts: list[tuple[np.ndarray, np.ndarray]] = field(default_factory=list)
    oracle_min: float = 0.0


def separation_oracle(w: np.ndarray, dims: Dims, params: WitnessParams
                      ) -> tuple[float, list[tuple[np.ndarray, np.ndarray]]]:
    """Search for product states |a,b> with <ab|W|ab> < 0.

    Alternating minimization: fixing one side reduces the other to a smallest
    eigenvector problem.  Seeded restarts guard against local minima and run
    as one batch.  Returns the best value found and the violating pairs.
    """
    da, db = dims
    wt = w.reshape(da, db, da, db)
    rng = np.random.default_rng(params.seed)
    r = params.oracle_restarts
    b = rng.standard_normal((r, db)) + 1j * rng.standard_normal((r, db))
    b /= np.linalg.norm(b, axis=1, keepdims=True)
    a = np.zeros((r, da), dtype=complex)
    val = np.full(r, np.inf)
    for _ in range(params.oracle_sweeps):
        ma = np.einsum("rj,ijkl,rl->rik", b.conj(), wt, b)
        ma = (ma + ma.conj().swapaxes(1, 2)) / 2
        a = np.linalg.eigh(ma)[1][:, :, 0]
        mb = np.einsum("ri,ijkl,rk->rjl", a.conj(), wt, a)
        mb = (mb + mb.conj().swapaxes(1, 2)) / 2
        vals, vecs = np.linalg.eigh(mb)
        b = vecs[:, :, 0]
        new_val = vals[:, 0]
        if np.max(np.abs(new_val - val)) < params.oracle_tol:
            val = new_val
            break
        val = new_val
    best_val = float(np.min(val))
    order = np.argsort(val)
    cuts: list[tuple[np.ndarray, np.ndarray]] = []
    for i in order:
        if val[i] >= -params.bp_tol:
            break
        dup = any(abs(np.vdot(a[i], a2)) ** 2 * abs(np.vdot(b[i], b2)) ** 2 > 1 - 1e-8
                  for a2, b2 in cuts)
        if not dup:
            cuts.append((a[i].copy(), b[i].copy()))
        if len(cuts) >= params.cuts_per_round:
            break
    return best_val, cuts


def _seed_cuts(dims: Dims) -> list[tuple[np.ndarray, np.ndarray]]:
    """Deterministic starter cuts: computational and Fourier product states."""
    da, db = dims
    cuts = []
    fa = np.exp(2j * np.pi * np.outer(np.arange(da), np.arange(da)) / da) / np.sqrt(da)
    fb = np.exp(2j * np.pi * np.outer(np.arange(db), np.arange(db)) / db) / np.sqrt(db)
    for i in range(da):
        for j in range(db):
            cuts.append((np.eye(da, dtype=complex)[i], np.eye(db, dtype=complex)[j]))
            cuts.append((fa[:, i].copy(), fb[:, j].copy()))
    return cuts


def optimal_witness(rho: np.ndarray, dims: Dims,
                    params: WitnessParams | None = None,
                    solver_params: SolverParams | None = None,
                    warm_cuts: list[tuple[np.ndarray, np.ndarray]] | None = None,
                    sink=None) -> Witness:
    """Unit-trace witness minimizing Tr(W rho), certified block-positive at
    separation-oracle strength.

    Cutting-plane loop: solve the boxed program over the current product-state
    constraints, then ask the oracle for violated products; stop once the
    oracle finds none below the block-positivity tolerance.  The eigenvalue
    box doubles (up to a budget) if it binds at convergence.
    """
    params = params or WitnessParams()
    d = dims[0] * dims[1]
    cuts = list(warm_cuts) if warm_cuts else _seed_cuts(dims)
    kappa = params.kappa
    rounds_left = params.max_rounds
    for _ in range(params.kappa_doublings + 1):
        while rounds_left > 0:
            rounds_left -= 1
            problem = build_witness_problem(rho, dims, cuts, kappa)
            verdict = solve(problem, solver_params)
            if sink is not None:
                sink("witness", problem, verdict)
            if verdict.status != "Optimal":
                raise WitnessUnconvergedError(
                    f"witness solve returned {verdict.status}")
            p_mat = hermitize(unembed_hermitian(verdict.point[0]))
            q_mat = hermitize(unembed_hermitian(verdict.point[1]))
            s_mat = hermitize(unembed_hermitian(verdict.point[2]))
            remainder = s_mat - kappa * np.eye(d)
            w = p_mat + partial_transpose(q_mat, dims) + remainder
            oracle_min, new_cuts = separation_oracle(w, dims, params)
            if oracle_min >= -params.bp_tol:
                if min_eig(remainder) <= -kappa + 1e-6:
                    break  # cage binds: enlarge and re-run
                value = hs_inner(w, rho)
                active = [(a, b) for a, b in cuts
                          if np.vdot(kron(a, b), w @ kron(a, b)).real < 1e-6]
                return Witness(operator=w, dims=dims, value=value,
                               support_states=active, cuts=cuts,
                               oracle_min=oracle_min)
            for a, b in new_cuts:
                cuts.append((a, b))
        else:
            raise WitnessUnconvergedError(
                f"no block-positive witness within {params.max_rounds} rounds")
        kappa *= 2
    raise WitnessUnconvergedError("remainder cage still active after enlargements")


def witness_estimate(witness: Witness, record: MeasurementRecord,
                     rho: np.ndarray) -> tuple[float, float]:
    """Witness expectation on the reconstruction and its error bar.

    The reconstruction splits into the component inside the measured span
    (identity included -- the trace is always known) and the remainder; the
    bar is the absolute witness expectation on the remainder.
    """
    d = rho.shape[0]
    rows = [herm_coords(np.eye(d, dtype=complex))]
    rows += [herm_coords(record.basis.ops[k]) for k in record.indices()]
    bmat = np.vstack(rows)
    v = herm_coords(rho)
    coeffs = np.linalg.lstsq(bmat @ bmat.T, bmat @ v, rcond=None)[0]
    known = herm_from_coords(bmat.T @ coeffs, d)
    unknown = rho - known
    estimate = hs_inner(witness.operator, rho)
    bar = abs(hs_inner(witness.operator, unknown))
    return estimate, bar


# ---------------------------------------------------------------------------
# Sequential protocol
# ---------------------------------------------------------------------------


@dataclass
class DetectionOutcome:
    step: int
    verdict: str  # CertifiedEntangled | Undecided
    method: str   # feasibility | feasibility+marginals | witness
    witness_value: float | None = None
    error_bar: float | None = None
    solver_status: str = ""


def sequential_detect(rho_true: np.ndarray, dims: Dims, basis, order: list[int],
                      method: str, marginals_known: bool = False,
                      witness_params: WitnessParams | None = None,
                      solver_params: SolverParams | None = None,
                      max_steps: int | None = None,
                      stop_at_certification: bool = False,
                      sink=None) -> list[DetectionOutcome]:
    """Measure ``order`` one index at a time and test for entanglement after
    each step.  Certification latches: data only grows, so a certified state
    stays certified at later steps.
    """
    from .observables import measure  # local import to avoid a cycle

    if sorted(order) != sorted(set(order)) or any(
            not 0 <= k < len(basis.ops) for k in order):
        raise ValueError("order must be a duplicate-free list of basis indices")
    if method not in ("feasibility", "feasibility+marginals", "witness"):
        raise ValueError(f"unknown method {method!r}")
    marginals = None
    if method == "feasibility+marginals" or (method == "witness" and marginals_known):
        marginals = (partial_trace(rho_true, dims, "B"),
                     partial_trace(rho_true, dims, "A"))

    outcomes: list[DetectionOutcome] = []
    certified = False
    carried_cuts: list[tuple[np.ndarray, np.ndarray]] | None = None
    steps = len(order) if max_steps is None else min(max_steps, len(order))
    tol = DEFAULT_TOL.certify_margin
    for n in range(1, steps + 1):
        record = measure(rho_true, basis, order[:n])
        if method in ("feasibility", "feasibility+marginals"):
            res = ppt_compatible(record, dims, marginals, solver_params, sink=sink)
            if res.status == "NoPptState":
                certified = True
            out = DetectionOutcome(
                step=n,
                verdict="CertifiedEntangled" if certified else "Undecided",
                method=method,
                solver_status=res.status,
            )
        else:
            try:
                rho_fit = reconstruct_state(record, dims, marginals,
                                            solver_params, sink=sink)
                witness = optimal_witness(rho_fit, dims, witness_params,
                                          solver_params, warm_cuts=carried_cuts,
                                          sink=sink)
                carried_cuts = witness.cuts
                est, bar = witness_estimate(witness, record, rho_fit)
                if est + bar < tol and est - bar < tol:
                    certified = True
                out = DetectionOutcome(
                    step=n,
                    verdict="CertifiedEntangled" if certified else "Undecided",
                    method=method,
                    witness_value=est,
                    error_bar=bar,
                    solver_status="ok",
                )
            except WitnessUnconvergedError:
                out = DetectionOutcome(
                    step=n,
                    verdict="CertifiedEntangled" if certified else "Undecided",
                    method=method,
                    solver_status="unconverged",
                )
            except ContradictoryRecordError:
                raise
        outcomes.append(out)
        if certified and stop_at_certification:
            break
    return outcomes


def first_certified_step(outcomes: list[DetectionOutcome]) -> int | None:
    for out in outcomes:
        if out.verdict == "CertifiedEntangled":
            return out.step
    return None
