"""Dense semidefinite-programming kernel with infeasibility certificates.

Solves  min <C, X>  s.t.  <A_i, X> = b_i,  <G_j, X> >= h_j,  X block-PSD,
over a product of dense symmetric blocks, via a homogeneous self-dual
embedding driven by a Mehrotra predictor-corrector interior-point method with
Nesterov-Todd scaling.  Problems arrive already real-embedded; complex
Hermitian data enters through :func:`embed_hermitian`.

Feasibility and infeasibility are decided symmetrically: an Infeasible
verdict always carries a dual improving ray that is re-verified by direct
arithmetic before being returned.  Inequalities are handled internally by
nonnegative slack scalars.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT_TOL


# ---------------------------------------------------------------------------
# Problem and verdict containers
# ---------------------------------------------------------------------------


@dataclass
class SdpProblem:
    """Block-PSD variable, affine equalities/inequalities, optional objective.

    ``eq``/``ineq`` entries are ``(mats, rhs)`` where ``mats`` lists one
    symmetric coefficient matrix per block (``None`` for an all-zero one);
    inequalities have sense >=.  ``obj`` lists per-block matrices of a
    minimized linear functional.
    """

    blocks: list[int]
    eq: list[tuple[list[np.ndarray | None], float]] = field(default_factory=list)
    ineq: list[tuple[list[np.ndarray | None], float]] = field(default_factory=list)
    obj: list[np.ndarray | None] | None = None


@dataclass
class SolverParams:
    max_iters: int = 200
    tol_feas: float = DEFAULT_TOL.sdp_feas
    tol_gap: float = DEFAULT_TOL.sdp_gap
    tol_cert: float = DEFAULT_TOL.sdp_cert
    tau_kappa: float = DEFAULT_TOL.tau_kappa
    step_frac: float = 0.98


@dataclass
class SdpVerdict:
    """Outcome of one solve.

    ``point`` holds per-block matrices for Feasible/Optimal verdicts.
    ``certificate`` holds the dual improving ray (one multiplier per original
    constraint, equalities first, then inequalities) for Infeasible verdicts,
    normalized so the combined right-hand side equals one.
    """

    status: str  # Feasible | Optimal | Infeasible | Unbounded | NumericalFailure
    point: list[np.ndarray] | None = None
    certificate: np.ndarray | None = None
    objective_value: float | None = None
    residuals: dict[str, float] = field(default_factory=dict)
    iterations: int = 0


# ---------------------------------------------------------------------------
# Hermitian embedding
# ---------------------------------------------------------------------------


def embed_hermitian(op: np.ndarray) -> np.ndarray:
    """Real symmetric embedding [[Re, -Im], [Im, Re]] of a Hermitian matrix.

    PSD is preserved both ways and every eigenvalue is doubled in
    multiplicity.  Inner products double: Tr(emb(A) emb(B)) = 2 Tr(A B).
    """
    op = np.asarray(op)
    re, im = op.real, op.imag
    return np.block([[re, -im], [im, re]])


def unembed_hermitian(m: np.ndarray) -> np.ndarray:
    """Project a real symmetric 2n x 2n matrix back to the Hermitian n x n form."""
    n = m.shape[0] // 2
    re = (m[:n, :n] + m[n:, n:]) / 2
    im = (m[n:, :n] - m[n:, :n].T) / 2
    return re + 1j * im


# ---------------------------------------------------------------------------
# svec machinery (scaled so that <svec(A), svec(B)> = Tr(A B))
# ---------------------------------------------------------------------------


class _BlockSpace:
    def __init__(self, n: int):
        self.n = n
        self.dim = n * (n + 1) // 2
        self.iu = np.triu_indices(n, 1)
        self.di = np.arange(n)

    def svec(self, m: np.ndarray) -> np.ndarray:
        return np.concatenate([m[..., self.di, self.di],
                               np.sqrt(2.0) * m[..., self.iu[0], self.iu[1]]], axis=-1)

    def smat(self, v: np.ndarray) -> np.ndarray:
        n = self.n
        m = np.zeros(v.shape[:-1] + (n, n))
        m[..., self.di, self.di] = v[..., :n]
        off = v[..., n:] / np.sqrt(2.0)
        m[..., self.iu[0], self.iu[1]] = off
        m[..., self.iu[1], self.iu[0]] = off
        return m


def _sym(m: np.ndarray) -> np.ndarray:
    return (m + m.swapaxes(-1, -2)) / 2


# ---------------------------------------------------------------------------
# Internal standard form: PSD segments + one pooled diagonal segment
# ---------------------------------------------------------------------------


class _StandardForm:
    """Slack-augmented equality form with constraint matrices pre-vectorized."""

    def __init__(self, problem: SdpProblem):
        self.problem = problem
        self.psd_sizes = [n for n in problem.blocks if n > 1]
        blocks = list(problem.blocks)
        self.n_ineq = len(problem.ineq)
        self.block_kind = [("psd", n) if n > 1 else ("diag", 1) for n in blocks]
        self.diag_orig = sum(1 for n in blocks if n == 1)
        self.diag_size = self.diag_orig + self.n_ineq
        self.spaces = [_BlockSpace(n) for n in self.psd_sizes]
        self.m = len(problem.eq) + len(problem.ineq)

        rows_psd = [np.zeros((self.m, n, n)) for n in self.psd_sizes]
        rows_diag = np.zeros((self.m, self.diag_size))
        b = np.zeros(self.m)
        for r, (mats, rhs) in enumerate(list(problem.eq) + list(problem.ineq)):
            if len(mats) != len(blocks):
                raise ValueError(f"constraint {r} has {len(mats)} blocks, expected {len(blocks)}")
            pi = di = 0
            for bi, n in enumerate(blocks):
                mat = mats[bi]
                if n > 1:
                    if mat is not None:
                        mat = np.asarray(mat, dtype=float)
                        if mat.shape != (n, n):
                            raise ValueError(f"constraint {r} block {bi}: shape {mat.shape} != ({n},{n})")
                        if np.max(np.abs(mat - mat.T)) > 1e-9 * max(1.0, np.max(np.abs(mat))):
                            raise ValueError(f"constraint {r} block {bi} is not symmetric")
                        rows_psd[pi][r] = _sym(mat)
                    pi += 1
                else:
                    if mat is not None:
                        rows_diag[r, di] = float(np.asarray(mat).reshape(()))
                    di += 1
            b[r] = float(rhs)
        # slack scalars for the inequality rows
        for j in range(self.n_ineq):
            rows_diag[len(problem.eq) + j, self.diag_orig + j] = -1.0
        self.A_psd_mats = rows_psd
        self.A_diag = rows_diag
        self.b = b

        c_psd = [np.zeros((n, n)) for n in self.psd_sizes]
        c_diag = np.zeros(self.diag_size)
        if problem.obj is not None:
            pi = di = 0
            for bi, n in enumerate(blocks):
                mat = problem.obj[bi]
                if n > 1:
                    if mat is not None:
                        c_psd[pi] = _sym(np.asarray(mat, dtype=float))
                    pi += 1
                else:
                    if mat is not None:
                        c_diag[di] = float(np.asarray(mat).reshape(()))
                    di += 1
        self.c_psd_mats = c_psd
        self.c_diag = c_diag

        self.A = self._vec_rows(rows_psd, rows_diag)
        self.c = self._vec(c_psd, c_diag)
        self.nu = sum(self.psd_sizes) + self.diag_size

    def _vec_rows(self, mats: list[np.ndarray], diag: np.ndarray) -> np.ndarray:
        parts = [sp.svec(mats[i]) for i, sp in enumerate(self.spaces)]
        parts.append(diag)
        return np.concatenate(parts, axis=-1)

    def _vec(self, mats: list[np.ndarray], diag: np.ndarray) -> np.ndarray:
        parts = [sp.svec(mats[i]) for i, sp in enumerate(self.spaces)]
        parts.append(diag)
        return np.concatenate(parts)

    def split(self, v: np.ndarray) -> tuple[list[np.ndarray], np.ndarray]:
        mats, off = [], 0
        for sp in self.spaces:
            mats.append(sp.smat(v[off:off + sp.dim]))
            off += sp.dim
        return mats, v[off:]

    def original_point(self, v: np.ndarray) -> list[np.ndarray]:
        """Reassemble per-block matrices of the original problem (slacks dropped)."""
        mats, diag = self.split(v)
        out, pi, di = [], 0, 0
        for kind, n in self.block_kind:
            if kind == "psd":
                out.append(mats[pi])
                pi += 1
            else:
                out.append(np.array([[diag[di]]]))
                di += 1
        return out


# ---------------------------------------------------------------------------
# Presolve: drop linearly dependent rows, detecting flat contradictions
# ---------------------------------------------------------------------------


def _presolve_rows(A: np.ndarray, b: np.ndarray) -> tuple[list[int], np.ndarray | None]:
    """Return (kept row indices, contradiction certificate or None).

    Dependent rows with consistent right-hand sides are dropped; an
    inconsistent dependent row yields a Farkas certificate directly.
    """
    m = A.shape[0]
    kept: list[int] = []
    q_rows: list[np.ndarray] = []
    for r in range(m):
        v = A[r].copy()
        for q in q_rows:
            v -= (q @ A[r]) * q
        nrm = np.linalg.norm(v)
        if nrm > 1e-10 * (1.0 + np.linalg.norm(A[r])):
            kept.append(r)
            q_rows.append(v / nrm)
            continue
        coeffs, *_ = np.linalg.lstsq(A[kept].T, A[r], rcond=None)
        gap = b[r] - coeffs @ b[kept]
        if abs(gap) > 1e-9 * (1.0 + abs(b[r]) + float(np.max(np.abs(b[kept]), initial=0.0))):
            y = np.zeros(m)
            y[kept] = coeffs
            y[r] = -1.0
            return kept, y / (y @ b)
        # consistent duplicate: drop
    return kept, None


# ---------------------------------------------------------------------------
# Certificate verification (independent arithmetic, no solver state)
# ---------------------------------------------------------------------------


def verify_certificate(problem: SdpProblem, y: np.ndarray,
                       tol: float = DEFAULT_TOL.sdp_cert) -> tuple[bool, dict[str, float]]:
    """Check a claimed infeasibility certificate by direct arithmetic.

    Requires combined rhs y.b = 1, nonnegative multipliers on inequality rows,
    and -sum_i y_i A_i PSD (per block) within ``tol``.
    """
    y = np.asarray(y, dtype=float)
    n_eq = len(problem.eq)
    rows = list(problem.eq) + list(problem.ineq)
    if len(y) != len(rows):
        return False, {"error": float(len(y))}
    byp = sum(yi * rhs for yi, (_, rhs) in zip(y, rows))
    ineq_floor = float(np.min(y[n_eq:], initial=0.0))
    worst = 0.0
    for bi, n in enumerate(problem.blocks):
        s = np.zeros((n, n))
        for yi, (mats, _) in zip(y, rows):
            if mats[bi] is not None:
                s -= yi * np.asarray(mats[bi], dtype=float).reshape(n, n)
        scale = max(1.0, float(np.max(np.abs(s))))
        lo = float(np.linalg.eigvalsh(_sym(s))[0]) if n > 1 else float(s[0, 0])
        worst = min(worst, lo / scale)
    ok = abs(byp - 1.0) <= 1e-6 and ineq_floor >= -tol and worst >= -tol
    return ok, {"rhs_combo": float(byp), "min_eig_rel": worst, "ineq_floor": ineq_floor}


# ---------------------------------------------------------------------------
# The interior-point driver
# ---------------------------------------------------------------------------


class _NTScaling:
    """Per-iteration Nesterov-Todd scaling data for all segments."""

    def __init__(self, sf: _StandardForm, x: np.ndarray, s: np.ndarray):
        self.sf = sf
        xm, xd = sf.split(x)
        sm, sd = sf.split(s)
        self.G = []
        self.R = []
        self.Rinv = []
        self.lam = []
        for X, S in zip(xm, sm):
            lx = np.linalg.cholesky(_sym(X))
            ls = np.linalg.cholesky(_sym(S))
            u, sig, vt = np.linalg.svd(ls.T @ lx)
            r = lx @ vt.T @ np.diag(sig**-0.5)
            rinv = np.diag(sig**-0.5) @ u.T @ ls.T
            self.R.append(r)
            self.Rinv.append(rinv)
            self.G.append(r @ r.T)
            self.lam.append(sig)
        self.gd = np.sqrt(xd / sd)
        self.lam_d = np.sqrt(xd * sd)

    def apply_H(self, v: np.ndarray) -> np.ndarray:
        """x-like image G U G of an s-like vector U (the inverse NT Hessian)."""
        mats, diag = self.sf.split(v)
        out = [g @ m @ g for g, m in zip(self.G, mats)]
        return self.sf._vec(out, diag * self.gd**2)

    def apply_H_rows(self, rows_psd: list[np.ndarray], rows_diag: np.ndarray) -> np.ndarray:
        parts = []
        for i, sp in enumerate(self.sf.spaces):
            g = self.G[i]
            parts.append(sp.svec(g @ rows_psd[i] @ g))
        parts.append(rows_diag * self.gd[None, :] ** 2)
        return np.concatenate(parts, axis=-1)


def _max_step(lam: list[np.ndarray], lam_d: np.ndarray, sf: _StandardForm,
              d_scaled_mats: list[np.ndarray], d_scaled_diag: np.ndarray) -> float:
    """Largest alpha keeping Lambda + alpha * D PSD (scaled frame)."""
    alpha = np.inf
    for lm, dm in zip(lam, d_scaled_mats):
        w = 1.0 / np.sqrt(lm)
        lo = float(np.linalg.eigvalsh(_sym(w[:, None] * dm * w[None, :]))[0])
        if lo < 0:
            alpha = min(alpha, -1.0 / lo)
    if len(d_scaled_diag):
        ratios = d_scaled_diag / lam_d
        lo = float(np.min(ratios))
        if lo < 0:
            alpha = min(alpha, -1.0 / lo)
    return alpha


def solve(problem: SdpProblem, params: SolverParams | None = None) -> SdpVerdict:
    """Solve one problem; deterministic for fixed parameters.

    Returns Feasible (no objective) or Optimal (objective present) with a
    point, Infeasible with a verified dual certificate, Unbounded with a
    primal ray, or NumericalFailure (never silently mapped to Infeasible).
    """
    params = params or SolverParams()
    sf = _StandardForm(problem)
    kept, contradiction = _presolve_rows(sf.A, sf.b)
    if contradiction is not None:
        ok, diag = verify_certificate(problem, contradiction, params.tol_cert)
        if ok:
            return SdpVerdict(status="Infeasible", certificate=contradiction, residuals=diag)
        return SdpVerdict(status="NumericalFailure", residuals=diag)

    A = sf.A[kept]
    b = sf.b[kept]
    c = sf.c
    A_psd = [rows[kept] for rows in sf.A_psd_mats]
    A_diag = sf.A_diag[kept]
    m = len(kept)
    has_obj = problem.obj is not None

    def lift_y(y_red: np.ndarray) -> np.ndarray:
        y = np.zeros(sf.m)
        y[kept] = y_red
        return y

    # identity start
    x = sf._vec([np.eye(n) for n in sf.psd_sizes], np.ones(sf.diag_size))
    s = x.copy()
    y = np.zeros(m)
    tau, kappa = 1.0, 1.0
    norm_b, norm_c = np.linalg.norm(b), np.linalg.norm(c)
    nu = sf.nu + 1

    best_failure = {"pres": np.inf}
    for it in range(params.max_iters):
        # --- convergence checks on the current iterate
        if tau > 1e-12:
            xh, yh, sh = x / tau, y / tau, s / tau
            pres = np.linalg.norm(A @ xh - b) / (1 + norm_b)
            dres = np.linalg.norm(-A.T @ yh + c - sh) / (1 + norm_c)
            pobj, dobj = float(c @ xh), float(b @ yh)
            gap = abs(pobj - dobj) / (1 + abs(pobj) + abs(dobj))
            best_failure = {"pres": pres, "dres": dres, "gap": gap}
            if pres <= params.tol_feas and dres <= params.tol_feas and gap <= params.tol_gap:
                status = "Optimal" if has_obj else "Feasible"
                return SdpVerdict(
                    status=status,
                    point=sf.original_point(xh),
                    objective_value=pobj if has_obj else None,
                    residuals={"primal": pres, "dual": dres, "gap": gap},
                    iterations=it,
                )
        by = float(b @ y)
        if by > 1e-10 * (1 + norm_b):
            y_cert = lift_y(y / by)
            ok, diag = verify_certificate(problem, y_cert, 1e-9)
            if ok:
                ok2, diag2 = verify_certificate(problem, y_cert, params.tol_cert)
                assert ok2
                return SdpVerdict(status="Infeasible", certificate=y_cert,
                                  residuals=diag2, iterations=it)
        cx = float(c @ x)
        if has_obj and cx < -1e-10 * (1 + norm_c):
            x_ray = x / (-cx)
            if np.linalg.norm(A @ x_ray) <= 1e-9 * (1 + np.linalg.norm(x_ray)):
                return SdpVerdict(status="Unbounded",
                                  point=sf.original_point(x_ray), iterations=it)

        # --- Newton machinery
        try:
            nt = _NTScaling(sf, x, s)
        except np.linalg.LinAlgError:
            return SdpVerdict(status="NumericalFailure", residuals=best_failure, iterations=it)
        HA = nt.apply_H_rows(A_psd, A_diag)
        M = A @ HA.T
        M = (M + M.T) / 2
        jitter = 0.0
        for _ in range(6):
            try:
                L = np.linalg.cholesky(M + jitter * np.eye(m))
                break
            except np.linalg.LinAlgError:
                jitter = max(1e-14 * (1 + np.trace(M) / max(m, 1)), jitter * 100)
        else:
            return SdpVerdict(status="NumericalFailure", residuals=best_failure, iterations=it)

        def msolve(rhs: np.ndarray) -> np.ndarray:
            z = np.linalg.solve(L, rhs)
            return np.linalg.solve(L.T, z)

        r_p = A @ x - b * tau
        r_d = -A.T @ y + c * tau - s
        r_g = float(b @ y - c @ x - kappa)
        mu = (float(x @ s) + tau * kappa) / nu

        u_c = nt.apply_H(c)
        v1 = msolve(b + A @ u_c)

        def direction(eta: float, dc_mats: list[np.ndarray], dc_diag: np.ndarray,
                      d_tk: float) -> tuple[np.ndarray, np.ndarray, np.ndarray, float, float]:
            # d~c = R^{-T} L^{-1}(Dc) R^{-1}, block by block
            dt_parts, dd = [], dc_diag / nt.lam_d / nt.gd
            for i, sp in enumerate(sf.spaces):
                lm = nt.lam[i]
                denom = (lm[:, None] + lm[None, :]) / 2
                g = nt.Rinv[i].T @ (dc_mats[i] / denom) @ nt.Rinv[i]
                dt_parts.append(sp.svec(_sym(g)))
            dt_parts.append(dd)
            d_tilde = np.concatenate(dt_parts)

            w = nt.apply_H(d_tilde - eta * r_d)
            v2 = msolve(-eta * r_p - A @ w)
            denom_tau = float((b - A @ u_c) @ v1) + float(c @ u_c) + kappa / tau
            num_tau = -eta * r_g + float(c @ w) + d_tk / tau - float((b - A @ u_c) @ v2)
            dtau = num_tau / denom_tau
            dy = dtau * v1 + v2
            dx = nt.apply_H(A.T @ dy - c * dtau) + w
            ds = -A.T @ dy + c * dtau + eta * r_d
            dkappa = (d_tk - kappa * dtau) / tau
            return dx, dy, ds, dtau, dkappa

        def scaled_parts(dx: np.ndarray, ds: np.ndarray):
            dxm, dxd = sf.split(dx)
            dsm, dsd = sf.split(ds)
            dx_sc = [_sym(nt.Rinv[i] @ dxm[i] @ nt.Rinv[i].T) for i in range(len(dxm))]
            ds_sc = [_sym(nt.R[i].T @ dsm[i] @ nt.R[i]) for i in range(len(dsm))]
            return dx_sc, dxd / nt.gd, ds_sc, dsd * nt.gd

        # predictor
        dc_aff = [-np.diag(lm**2) for lm in nt.lam]
        dx, dy, ds, dtau, dkappa = direction(1.0, dc_aff, -nt.lam_d**2, -tau * kappa)
        dx_sc, dxd_sc, ds_sc, dsd_sc = scaled_parts(dx, ds)
        a_x = _max_step(nt.lam, nt.lam_d, sf, dx_sc, dxd_sc)
        a_s = _max_step(nt.lam, nt.lam_d, sf, ds_sc, dsd_sc)
        a_t = np.inf if dtau >= 0 else -tau / dtau
        a_k = np.inf if dkappa >= 0 else -kappa / dkappa
        alpha_aff = min(1.0, 0.999 * min(a_x, a_s, a_t, a_k))
        mu_aff = (float((x + alpha_aff * dx) @ (s + alpha_aff * ds))
                  + (tau + alpha_aff * dtau) * (kappa + alpha_aff * dkappa)) / nu
        sigma = float(np.clip((mu_aff / mu) ** 3, 0.0, 1.0))

        # combined corrector step
        dc_mats = []
        for i, lm in enumerate(nt.lam):
            corr = _sym(dx_sc[i] @ ds_sc[i])
            dc_mats.append(sigma * mu * np.eye(len(lm)) - np.diag(lm**2) - corr)
        dc_diag = sigma * mu - nt.lam_d**2 - dxd_sc * dsd_sc
        d_tk = sigma * mu - tau * kappa - dtau * dkappa
        dx, dy, ds, dtau, dkappa = direction(1.0 - sigma, dc_mats, dc_diag, d_tk)
        dx_sc, dxd_sc, ds_sc, dsd_sc = scaled_parts(dx, ds)
        a_x = _max_step(nt.lam, nt.lam_d, sf, dx_sc, dxd_sc)
        a_s = _max_step(nt.lam, nt.lam_d, sf, ds_sc, dsd_sc)
        a_t = np.inf if dtau >= 0 else -tau / dtau
        a_k = np.inf if dkappa >= 0 else -kappa / dkappa
        alpha = min(1.0, params.step_frac * min(a_x, a_s, a_t, a_k))
        if alpha < 1e-10:
            return SdpVerdict(status="NumericalFailure", residuals=best_failure, iterations=it)

        x = x + alpha * dx
        y = y + alpha * dy
        s = s + alpha * ds
        tau = tau + alpha * dtau
        kappa = kappa + alpha * dkappa

        # endgame fallback on the tau/kappa ratio
        if mu < 1e-14 and tau / max(kappa, 1e-300) < params.tau_kappa:
            by = float(b @ y)
            if by > 0:
                y_cert = lift_y(y / by)
                ok, diag = verify_certificate(problem, y_cert, params.tol_cert)
                if ok:
                    return SdpVerdict(status="Infeasible", certificate=y_cert,
                                      residuals=diag, iterations=it)
            return SdpVerdict(status="NumericalFailure", residuals=best_failure, iterations=it)

    return SdpVerdict(status="NumericalFailure", residuals=best_failure,
                      iterations=params.max_iters)


# ---------------------------------------------------------------------------
# Point verification and JSON round trip
# ---------------------------------------------------------------------------


def verify_point(problem: SdpProblem, point: list[np.ndarray],
                 tol_eq: float = 1e-6, tol_psd: float = -1e-7) -> tuple[bool, dict[str, float]]:
    """Re-check a claimed feasible point against the problem data."""
    worst_eq = 0.0
    for mats, rhs in problem.eq:
        v = sum(float(np.sum(np.asarray(mats[bi]) * point[bi]))
                for bi in range(len(point)) if mats[bi] is not None)
        worst_eq = max(worst_eq, abs(v - rhs) / (1 + abs(rhs)))
    worst_ineq = 0.0
    for mats, rhs in problem.ineq:
        v = sum(float(np.sum(np.asarray(mats[bi]) * point[bi]))
                for bi in range(len(point)) if mats[bi] is not None)
        worst_ineq = max(worst_ineq, max(0.0, (rhs - v)) / (1 + abs(rhs)))
    min_eig = min(
        float(np.linalg.eigvalsh(_sym(p))[0]) if p.shape[0] > 1 else float(p[0, 0])
        for p in point
    )
    ok = worst_eq <= tol_eq and worst_ineq <= tol_eq and min_eig >= tol_psd
    return ok, {"eq": worst_eq, "ineq": worst_ineq, "min_eig": min_eig}


def problem_to_dict(problem: SdpProblem) -> dict:
    def enc_mats(mats):
        out = []
        for bi, n in enumerate(problem.blocks):
            m = mats[bi]
            if m is None:
                out.append(np.zeros((n, n)).tolist())
            else:
                out.append(np.asarray(m, dtype=float).reshape(n, n).tolist())
        return out

    d = {
        "blocks": list(problem.blocks),
        "eq": [{"A": enc_mats(mats), "b": float(rhs)} for mats, rhs in problem.eq],
        "ineq": [{"A": enc_mats(mats), "b": float(rhs)} for mats, rhs in problem.ineq],
        "obj": None if problem.obj is None else {"C": enc_mats(problem.obj)},
    }
    return d


def problem_from_dict(d: dict) -> SdpProblem:
    blocks = [int(n) for n in d["blocks"]]

    def dec_mats(lst):
        return [np.asarray(m, dtype=float) for m in lst]

    eq = [(dec_mats(e["A"]), float(e["b"])) for e in d.get("eq", [])]
    ineq = [(dec_mats(e["A"]), float(e["b"])) for e in d.get("ineq", [])]
    obj = None
    if d.get("obj") is not None:
        obj = dec_mats(d["obj"]["C"])
    return SdpProblem(blocks=blocks, eq=eq, ineq=ineq, obj=obj)


def dumps_canonical(payload: dict) -> str:
    """Canonical JSON text: sorted keys, no whitespace, shortest float reprs."""
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))
