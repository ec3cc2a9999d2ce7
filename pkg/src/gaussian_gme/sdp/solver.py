"""Dense primal-dual interior-point solver for small block SDPs.

Implements a homogeneous self-dual embedding with Nesterov-Todd scaling and
a Mehrotra predictor-corrector step, entirely in dense real arithmetic.  The
homogeneous variables (tau, kappa) make infeasibility detection a byproduct:
tau -> 0 with kappa bounded away from zero yields a certificate instead of a
diverging iterate.

Problem sizes here are tiny (a few hundred variables), so every linear
system is formed and factored densely each iteration.
"""

from __future__ import annotations

import json

import numpy as np
import scipy.linalg

from .problem import (
    INFEASIBLE,
    MAX_ITERATIONS,
    OPTIMAL,
    UNBOUNDED,
    SdpProblem,
    SdpSolution,
    SolverOptions,
)


class _Breakdown(Exception):
    """Raised when a scaling or factorization loses positive definiteness."""


class _Cone:
    """Layout-aware operations on the product cone (PSD blocks + orthant)."""

    def __init__(self, psd_dims: list[int], n_scalar: int):
        self.psd_dims = psd_dims
        self.n_scalar = n_scalar
        self.slices = []
        pos = 0
        for d in psd_dims:
            self.slices.append(slice(pos, pos + d * d))
            pos += d * d
        self.nn_slice = slice(pos, pos + n_scalar)
        self.n_total = pos + n_scalar
        # Barrier degree: matrix blocks count their side length.
        self.degree = sum(psd_dims) + n_scalar

    def mats(self, v: np.ndarray) -> list[np.ndarray]:
        return [v[sl].reshape(d, d) for sl, d in zip(self.slices, self.psd_dims)]

    def nn(self, v: np.ndarray) -> np.ndarray:
        return v[self.nn_slice]

    def identity(self) -> np.ndarray:
        e = np.zeros(self.n_total)
        for sl, d in zip(self.slices, self.psd_dims):
            e[sl] = np.eye(d).ravel()
        e[self.nn_slice] = 1.0
        return e

    def flatten(self, mats: list[np.ndarray], nn: np.ndarray) -> np.ndarray:
        v = np.empty(self.n_total)
        for sl, m in zip(self.slices, mats):
            v[sl] = m.ravel()
        v[self.nn_slice] = nn
        return v

    def symmetrize(self, v: np.ndarray) -> np.ndarray:
        out = v.copy()
        for sl, d in zip(self.slices, self.psd_dims):
            m = out[sl].reshape(d, d)
            out[sl] = (0.5 * (m + m.T)).ravel()
        return out


class _Scaling:
    """Nesterov-Todd scaling point for the current (x, s)."""

    def __init__(self, cone: _Cone, x: np.ndarray, s: np.ndarray):
        self.cone = cone
        self.R = []
        self.Rti = []  # R^{-T}
        self.W = []    # R R^T
        self.lam_mats = []
        for xm, sm in zip(cone.mats(x), cone.mats(s)):
            try:
                l1 = np.linalg.cholesky(0.5 * (xm + xm.T))
                l2 = np.linalg.cholesky(0.5 * (sm + sm.T))
            except np.linalg.LinAlgError as exc:
                raise _Breakdown("non-PD iterate in NT scaling") from exc
            u, sig, vt = np.linalg.svd(l2.T @ l1)
            if np.min(sig) <= 0:
                raise _Breakdown("singular NT scaling")
            inv_sqrt = 1.0 / np.sqrt(sig)
            r = l1 @ vt.T * inv_sqrt
            rti = l2 @ u * inv_sqrt
            self.R.append(r)
            self.Rti.append(rti)
            self.W.append(r @ r.T)
            self.lam_mats.append(sig)
        xs_nn = cone.nn(x)
        ss_nn = cone.nn(s)
        if np.any(xs_nn <= 0) or np.any(ss_nn <= 0):
            raise _Breakdown("nonpositive scalar iterate in NT scaling")
        self.w_nn = np.sqrt(xs_nn / ss_nn)
        self.lam_nn = np.sqrt(xs_nn * ss_nn)

    def apply_W(self, v: np.ndarray) -> np.ndarray:
        """v -> W v W on matrix blocks, w^2 * v on the orthant."""
        cone = self.cone
        out = np.empty(cone.n_total)
        for sl, d, w in zip(cone.slices, cone.psd_dims, self.W):
            m = v[sl].reshape(d, d)
            out[sl] = (w @ m @ w).ravel()
        out[cone.nn_slice] = self.w_nn ** 2 * v[cone.nn_slice]
        return out

    def scale_x(self, v: np.ndarray) -> np.ndarray:
        """x-like vector into scaled space: R^{-1} X R^{-T} (v / w on orthant)."""
        cone = self.cone
        out = np.empty(cone.n_total)
        for sl, d, rti in zip(cone.slices, cone.psd_dims, self.Rti):
            m = v[sl].reshape(d, d)
            out[sl] = (rti.T @ m @ rti).ravel()
        out[cone.nn_slice] = v[cone.nn_slice] / self.w_nn
        return out

    def scale_s(self, v: np.ndarray) -> np.ndarray:
        """s-like vector into scaled space: R^T S R (w * v on orthant)."""
        cone = self.cone
        out = np.empty(cone.n_total)
        for sl, d, r in zip(cone.slices, cone.psd_dims, self.R):
            m = v[sl].reshape(d, d)
            out[sl] = (r.T @ m @ r).ravel()
        out[cone.nn_slice] = self.w_nn * v[cone.nn_slice]
        return out

    def unscale_to_x(self, g: np.ndarray) -> np.ndarray:
        """Scaled-space G back through R . R^T (w * g on the orthant)."""
        cone = self.cone
        out = np.empty(cone.n_total)
        for sl, d, r in zip(cone.slices, cone.psd_dims, self.R):
            m = g[sl].reshape(d, d)
            out[sl] = (r @ m @ r.T).ravel()
        out[cone.nn_slice] = self.w_nn * g[cone.nn_slice]
        return out

    def lam_inverse_op(self, d: np.ndarray) -> np.ndarray:
        """Solve lam o g = d in scaled space: g_ij = 2 d_ij / (lam_i + lam_j)."""
        cone = self.cone
        out = np.empty(cone.n_total)
        for sl, dim, lam in zip(cone.slices, cone.psd_dims, self.lam_mats):
            m = d[sl].reshape(dim, dim)
            denom = 0.5 * (lam[:, None] + lam[None, :])
            out[sl] = (m / denom).ravel()
        out[cone.nn_slice] = d[cone.nn_slice] / self.lam_nn
        return out

    def lam_vector(self) -> np.ndarray:
        cone = self.cone
        out = np.zeros(cone.n_total)
        for sl, dim, lam in zip(cone.slices, cone.psd_dims, self.lam_mats):
            out[sl] = np.diag(lam).ravel()
        out[cone.nn_slice] = self.lam_nn
        return out

    def max_step(self, g: np.ndarray) -> float:
        """Largest alpha with Lambda + alpha*G staying in the cone (scaled space)."""
        cone = self.cone
        alpha = np.inf
        for sl, dim, lam in zip(cone.slices, cone.psd_dims, self.lam_mats):
            m = g[sl].reshape(dim, dim)
            scale = 1.0 / np.sqrt(lam)
            h = scale[:, None] * m * scale[None, :]
            low = float(np.linalg.eigvalsh(0.5 * (h + h.T))[0])
            if low < 0:
                alpha = min(alpha, 1.0 / (-low))
        gn = g[cone.nn_slice]
        neg = gn < 0
        if np.any(neg):
            alpha = min(alpha, float(np.min(self.lam_nn[neg] / (-gn[neg]))))
        return alpha


def _sym_product(a: np.ndarray, b: np.ndarray, cone: _Cone) -> np.ndarray:
    """Jordan product (symmetrized) of two scaled-space vectors."""
    out = np.empty(cone.n_total)
    for sl, d in zip(cone.slices, cone.psd_dims):
        ma = a[sl].reshape(d, d)
        mb = b[sl].reshape(d, d)
        out[sl] = (0.5 * (ma @ mb + mb @ ma)).ravel()
    out[cone.nn_slice] = a[cone.nn_slice] * b[cone.nn_slice]
    return out


def _identity_times(cone: _Cone, value: float) -> np.ndarray:
    return cone.identity() * value


def _preprocess(A: np.ndarray, b: np.ndarray):
    """Drop linearly dependent equality rows; detect inconsistent systems.

    Returns (A_kept, b_kept, kept_indices) or raises ``_Inconsistent``.
    """
    m = A.shape[0]
    if m == 0:
        return A, b, np.array([], dtype=int)
    _, r, piv = scipy.linalg.qr(A.T, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r)) if r.size else np.array([0.0])
    tol = max(A.shape) * np.finfo(float).eps * (diag[0] if diag.size else 0.0)
    rank = int(np.sum(diag > max(tol, 1e-300)))
    if rank == m:
        return A, b, np.arange(m)
    aug = np.hstack([A, b[:, None]])
    rank_aug = np.linalg.matrix_rank(aug, tol=None)
    if rank_aug > rank:
        raise _Inconsistent("equality constraints are inconsistent")
    keep = np.sort(piv[:rank])
    return A[keep], b[keep], keep


class _Inconsistent(Exception):
    pass


def _schur(A: np.ndarray, scal: _Scaling) -> np.ndarray:
    cone = scal.cone
    m = A.shape[0]
    M = np.zeros((m, m))
    for sl, d, w in zip(cone.slices, cone.psd_dims, scal.W):
        ab = A[:, sl].reshape(m, d, d)
        t = np.matmul(np.matmul(w, ab), w)
        M += ab.reshape(m, d * d) @ t.reshape(m, d * d).T
    ann = A[:, cone.nn_slice]
    if ann.shape[1]:
        M += (ann * scal.w_nn ** 2) @ ann.T
    return 0.5 * (M + M.T)


class _KKT:
    """Factorized Schur complement M = A W A^T with iterative refinement."""

    def __init__(self, M: np.ndarray):
        self.M = M
        m = M.shape[0]
        if m == 0:
            self.factor = None
            return
        ridge = 0.0
        base = np.trace(M) / m if m else 0.0
        for attempt in range(4):
            try:
                self.factor = scipy.linalg.cho_factor(
                    M + ridge * np.eye(m), lower=True, check_finite=False
                )
                return
            except np.linalg.LinAlgError:
                ridge = max(base, 1.0) * 10.0 ** (-14 + 4 * attempt)
        raise _Breakdown("Schur complement lost positive definiteness")

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        if self.factor is None:
            return np.zeros(0)
        v = scipy.linalg.cho_solve(self.factor, rhs, check_finite=False)
        resid = rhs - self.M @ v
        v += scipy.linalg.cho_solve(self.factor, resid, check_finite=False)
        return v


def solve(problem: SdpProblem, options: SolverOptions | None = None) -> SdpSolution:
    """Solve the conic problem, never raising on numerical breakdown."""
    opts = options or SolverOptions()
    psd_dims, n_scalar, A_full, b_full, c = problem.compiled()
    cone = _Cone(psd_dims, n_scalar)

    try:
        A, b, kept = _preprocess(A_full, b_full)
    except _Inconsistent as exc:
        return _finish(
            problem, cone, INFEASIBLE, np.zeros(cone.n_total), np.zeros(len(b_full)),
            np.zeros(cone.n_total), 1.0, c, A_full, b_full, 0, str(exc),
        )

    trace_fh = open(opts.trace_file, "w") if opts.trace_file else None
    try:
        status, x, y_red, s, tau, iters, message, best = _ipm(
            cone, A, b, c, opts, trace_fh
        )
    finally:
        if trace_fh:
            trace_fh.close()
    if status not in (INFEASIBLE, UNBOUNDED):
        # Feasibility-polish the best iterate and let its measured quality
        # decide: a run that stalled a hair above tolerance still counts.
        bx, by, bs, btau = best
        px, py, ps, ptau = _polish(cone, A, b, c, bx, by, bs, btau)
        if _is_optimal(cone, A, b, c, px, py, ps, opts):
            status, message = OPTIMAL, message if status == OPTIMAL else (
                f"converged after polish ({message})"
            )
            x, y_red, s, tau = px, py, ps, ptau
    y = np.zeros(len(b_full))
    if len(kept):
        y[kept] = y_red
    return _finish(problem, cone, status, x, y, s, tau, c, A_full, b_full, iters, message)


def _is_optimal(cone, A, b, c, xt, yt, st, opts) -> bool:
    norm_b = 1.0 + (float(np.max(np.abs(b))) if b.size else 0.0)
    norm_c = 1.0 + (float(np.max(np.abs(c))) if c.size else 0.0)
    pres = float(np.max(np.abs(A @ xt - b))) if A.shape[0] else 0.0
    dres = float(np.max(np.abs(A.T @ yt + st - c)))
    if pres > opts.feas_tol * norm_b or dres > opts.feas_tol * norm_c:
        return False
    pobj, dobj = float(c @ xt), float(b @ yt)
    if float(xt @ st) > opts.gap_tol * (1.0 + abs(pobj) + abs(dobj)):
        return False
    scale_x = 1.0 + float(np.max(np.abs(xt)))
    scale_s = 1.0 + float(np.max(np.abs(st)))
    for v, scale in ((xt, scale_x), (st, scale_s)):
        for mat in cone.mats(v):
            if float(np.linalg.eigvalsh(mat)[0]) < -opts.feas_tol * scale:
                return False
        if v[cone.nn_slice].size and float(np.min(v[cone.nn_slice])) < -opts.feas_tol * scale:
            return False
    return True


def _polish(cone, A, b, c, x, y, s, tau):
    """Project the tau-scaled point onto exact primal/dual feasibility.

    The least-squares correction is of the order of the residuals the
    interior-point loop achieved, so cone memberships survive to within the
    feasibility tolerance while the equality residuals drop to roundoff.
    """
    xt, yt = x / tau, y / tau
    if A.shape[0]:
        try:
            factor = scipy.linalg.cho_factor(A @ A.T, lower=True, check_finite=False)
            xt = xt + A.T @ scipy.linalg.cho_solve(
                factor, b - A @ xt, check_finite=False
            )
        except np.linalg.LinAlgError:
            pass
    st = cone.symmetrize(c - A.T @ yt)
    return cone.symmetrize(xt), yt, st, 1.0


def _finish(problem, cone, status, x, y, s, tau, c, A, b, iters, message):
    t = tau if tau > 1e-300 else 1.0
    xt, yt, st = x / t, y / t, s / t
    block_values = []
    i_psd = 0
    i_nn = 0
    xmats = cone.mats(cone.symmetrize(xt))
    xnn = cone.nn(xt)
    for spec in problem.blocks:
        if spec.kind == "psd":
            block_values.append(xmats[i_psd])
            i_psd += 1
        else:
            block_values.append(float(xnn[i_nn]))
            i_nn += 1
    gap = float(xt @ st)
    return SdpSolution(
        status=status,
        primal_value=float(c @ xt),
        dual_value=float(b @ yt),
        gap=gap,
        block_values=block_values,
        dual_multipliers=yt,
        iterations=iters,
        message=message,
    )


def _ipm(cone: _Cone, A: np.ndarray, b: np.ndarray, c: np.ndarray,
         opts: SolverOptions, trace_fh):
    m = A.shape[0]
    x = cone.identity()
    s = cone.identity()
    y = np.zeros(m)
    tau, kappa = 1.0, 1.0
    degree = cone.degree + 1

    norm_b = 1.0 + float(np.max(np.abs(b))) if m else 1.0
    norm_c = 1.0 + float(np.max(np.abs(c))) if c.size else 1.0

    mu0 = (x @ s + tau * kappa) / degree
    r_p0 = max(1.0, float(np.linalg.norm(A @ x - b * tau)))
    r_d0 = max(1.0, float(np.linalg.norm(A.T @ y + s - c * tau)))

    status, message = MAX_ITERATIONS, "iteration limit reached"
    best_score = np.inf
    best_point = (x, y, s, tau)
    it = 0
    for it in range(1, opts.max_iter + 1):
        r_p = A @ x - b * tau
        r_d = cone.symmetrize(A.T @ y + s - c * tau)
        r_g = float(c @ x - b @ y + kappa)
        mu = (x @ s + tau * kappa) / degree

        _assert_weak_duality(x, y, s, r_p, r_d, c, b, tau)

        xt, yt, st = x / tau, y / tau, s / tau
        pres = float(np.max(np.abs(A @ xt - b))) if m else 0.0
        dres = float(np.max(np.abs(A.T @ yt + st - c)))
        pobj = float(c @ xt)
        dobj = float(b @ yt)
        gap = float(xt @ st)
        relgap = gap / (1.0 + abs(pobj) + abs(dobj))
        score = max(
            pres / (opts.feas_tol * norm_b),
            dres / (opts.feas_tol * norm_c),
            relgap / opts.gap_tol,
        )
        if score < best_score:
            best_score = score
            best_point = (x.copy(), y.copy(), s.copy(), tau)

        if trace_fh:
            trace_fh.write(json.dumps({
                "iter": it - 1, "mu": mu, "pres": pres, "dres": dres,
                "gap": gap, "tau": tau, "kappa": kappa,
                "pobj": pobj, "dobj": dobj,
            }) + "\n")

        if score <= 1.0:
            status, message = OPTIMAL, "converged"
            x, y, s, tau = best_point
            break

        # tau/kappa ratio collapse signals an infeasibility certificate.
        rho_mu = mu / mu0
        rho_p = float(np.linalg.norm(r_p)) / r_p0
        rho_d = float(np.linalg.norm(r_d)) / r_d0
        if tau <= 1e-8 * min(1.0, kappa) and rho_mu <= 1e-10:
            if b @ y > max(1e-12, 1e-6 * abs(c @ x)):
                status, message = INFEASIBLE, "primal infeasibility certificate"
            elif c @ x < -max(1e-12, 1e-6 * abs(b @ y)):
                status, message = UNBOUNDED, "dual infeasibility certificate"
            else:
                status, message = MAX_ITERATIONS, "ill-posed: tau and kappa both vanish"
            break
        if rho_mu <= 1e-14 and rho_p <= 1e-14 and rho_d <= 1e-14:
            status, message = MAX_ITERATIONS, "stalled at numerical precision"
            break

        try:
            scal = _Scaling(cone, x, s)
            kkt = _KKT(_schur(A, scal))
            w_c = scal.apply_W(c)
            q = A @ w_c
            w_cc = float(c @ w_c)
            v_qb = kkt.solve(q + b)

            lam = scal.lam_vector()

            def direction(p_hat, d_hat, g_hat, G, h):
                rgr = scal.unscale_to_x(G)
                w_d = scal.apply_W(d_hat)
                v_u = kkt.solve(p_hat - A @ rgr + A @ w_d)
                t_G = float(c @ rgr)
                c_wd = float(c @ w_d)
                num = g_hat - t_G + c_wd - h / tau - float((q - b) @ v_u)
                den = float((q - b) @ v_qb) - w_cc - kappa / tau
                if den == 0.0 or not np.isfinite(den):
                    raise _Breakdown("singular tau elimination")
                dtau = num / den
                dy = v_u + dtau * v_qb
                dx = scal.apply_W(A.T @ dy - c * dtau - d_hat) + rgr
                ds = cone.symmetrize(d_hat - A.T @ dy + c * dtau)
                dx = cone.symmetrize(dx)
                dkappa = (h - kappa * dtau) / tau
                return dx, dy, ds, dtau, dkappa

            def boundary(dx, ds, dtau, dkappa):
                a = scal.max_step(cone.symmetrize(scal.scale_x(dx)))
                a = min(a, scal.max_step(cone.symmetrize(scal.scale_s(ds))))
                if dtau < 0:
                    a = min(a, tau / (-dtau))
                if dkappa < 0:
                    a = min(a, kappa / (-dkappa))
                return a

            # Predictor: pure Newton step toward the boundary.
            G_aff = -lam
            h_aff = -tau * kappa
            aff = direction(-r_p, -r_d, -r_g, G_aff, h_aff)
            a_aff = min(1.0, boundary(aff[0], aff[2], aff[3], aff[4]))

            mu_aff = ((x + a_aff * aff[0]) @ (s + a_aff * aff[2])
                      + (tau + a_aff * aff[3]) * (kappa + a_aff * aff[4])) / degree
            sigma = min(1.0, max(0.0, (mu_aff / mu) ** 3))

            # Corrector: recentre and compensate the second-order term.
            dx_aff_s = cone.symmetrize(scal.scale_x(aff[0]))
            ds_aff_s = cone.symmetrize(scal.scale_s(aff[2]))
            comp = (_identity_times(cone, sigma * mu)
                    - _sym_product(lam, lam, cone)
                    - _sym_product(dx_aff_s, ds_aff_s, cone))
            G_comb = scal.lam_inverse_op(comp)
            h_comb = sigma * mu - tau * kappa - aff[3] * aff[4]
            eta = 1.0 - sigma
            comb = direction(-eta * r_p, -eta * r_d, -eta * r_g, G_comb, h_comb)

            alpha = min(1.0, opts.step_scale * boundary(comb[0], comb[2], comb[3], comb[4]))
            if alpha <= 1e-10:
                status, message = MAX_ITERATIONS, "step length collapsed"
                break

            x = cone.symmetrize(x + alpha * comb[0])
            y = y + alpha * comb[1]
            s = cone.symmetrize(s + alpha * comb[2])
            tau = tau + alpha * comb[3]
            kappa = kappa + alpha * comb[4]
        except _Breakdown as exc:
            status, message = MAX_ITERATIONS, f"numerical breakdown: {exc}"
            break

    return status, x, y, s, tau, it, message, best_point


def _assert_weak_duality(x, y, s, r_p, r_d, c, b, tau):
    """c.x - b.y >= (y.r_p - x.r_d)/tau holds whenever <x, s> >= 0.

    The inequality follows from the residual identity
    c.x - b.y = (<x, s> - <x, r_d> + <y, r_p>)/tau, so a violation beyond
    roundoff means an iterate has left the cone.
    """
    lhs = float(c @ x - b @ y)
    rhs = float(y @ r_p - x @ r_d) / tau
    slack = 1e-8 * (1.0 + abs(lhs) + abs(rhs) + float(x @ s) / tau)
    assert lhs >= rhs - slack, (
        f"weak duality violated: {lhs} < {rhs} (slack {slack})"
    )
