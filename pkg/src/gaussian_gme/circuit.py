"""Linear-optical preparation circuits for target covariance matrices.

The compilation chain is: symplectic diagonalisation (thermal inputs),
Euler factorization of the symplectic into passive / squeezing / passive
stages, and factorization of each phase-free passive into an array of three
fixed-convention beam splitters.  A simplified variant replaces the dominant
thermal input by correlated classical displacements of squeezed vacua.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .symplectic import (
    CovarianceMatrix,
    check_physical,
    has_xp_correlations,
    omega,
)

RECON_TOL = 1e-8


class UnsupportedDecomposition(ValueError):
    """Input outside the range of the fixed beam-splitter parametrization."""


def _xs_ps(n: int):
    return np.arange(0, 2 * n, 2), np.arange(1, 2 * n, 2)


def _sqrtm_sym(m: np.ndarray) -> np.ndarray:
    ev, vec = np.linalg.eigh(0.5 * (m + m.T))
    if np.min(ev) < 0:
        ev = np.clip(ev, 0.0, None)
    return vec @ np.diag(np.sqrt(ev)) @ vec.T


def expand_phase_free(m3: np.ndarray) -> np.ndarray:
    """Lift an n x n mode-space matrix to quadrature space (same on x and p)."""
    n = m3.shape[0]
    xs, ps = _xs_ps(n)
    out = np.zeros((2 * n, 2 * n))
    out[np.ix_(xs, xs)] = m3
    out[np.ix_(ps, ps)] = m3
    return out


def is_symplectic(s: np.ndarray, tol: float = 1e-8) -> bool:
    n = s.shape[0] // 2
    w = omega(n)
    return bool(np.max(np.abs(s @ w @ s.T - w)) <= tol)


def symplectic_residual(s: np.ndarray) -> float:
    n = s.shape[0] // 2
    w = omega(n)
    return float(np.max(np.abs(s @ w @ s.T - w)))


# ---------------------------------------------------------------------------
# Symplectic diagonalisation


@dataclass(frozen=True)
class WilliamsonResult:
    """gamma = S W S^T with S symplectic, W = diag of nu (descending, x2)."""

    s: np.ndarray
    nu: np.ndarray

    @property
    def w(self) -> np.ndarray:
        return np.diag(np.repeat(self.nu, 2))


def symplectic_eigenvalues(gamma: CovarianceMatrix) -> np.ndarray:
    """Magnitudes of the eigenvalues of i*Omega*gamma, one per mode, descending."""
    n = gamma.n_modes
    ev = np.linalg.eigvals(1j * omega(n) @ gamma.matrix)
    mags = np.sort(np.abs(ev))[::-1]
    return mags[::2]  # each value appears twice


def williamson(gamma: CovarianceMatrix) -> WilliamsonResult:
    """Normal-form factorization gamma = S W S^T.

    Route: with G = gamma^{1/2}, bring the antisymmetric matrix G Omega G to
    its real canonical form by an orthogonal congruence and rescale the basis
    by nu^{-1/2}.  For inputs without x-p correlations the congruence is
    built in mode space so that S is itself free of x-p mixing.
    """
    ok, min_eig = check_physical(gamma, tol=1e-9)
    if not ok:
        raise ValueError(f"state is not physical (min eig {min_eig:.3e})")
    n = gamma.n_modes
    if not has_xp_correlations(gamma, tol=0.0):
        s, nu = _williamson_phase_free(gamma.matrix)
    else:
        s, nu = _williamson_generic(gamma.matrix)
    w = np.diag(np.repeat(nu, 2))
    recon = np.max(np.abs(s @ w @ s.T - gamma.matrix))
    if recon > RECON_TOL or symplectic_residual(s) > RECON_TOL:
        raise ArithmeticError(
            f"normal-form factorization failed (residual {recon:.2e})"
        )
    return WilliamsonResult(s=s, nu=nu)


def _williamson_phase_free(g: np.ndarray):
    n = g.shape[0] // 2
    xs, ps = _xs_ps(n)
    x = g[np.ix_(xs, xs)]
    p = g[np.ix_(ps, ps)]
    xh = _sqrtm_sym(x)
    ph = _sqrtm_sym(p)
    m = xh @ p @ xh
    nu_sq, a = np.linalg.eigh(0.5 * (m + m.T))
    nu = np.sqrt(np.clip(nu_sq, 0.0, None))
    order = np.argsort(-nu)
    nu = nu[order]
    a = a[:, order]
    b = ph @ xh @ a / nu[None, :]
    s = np.zeros((2 * n, 2 * n))
    s[np.ix_(xs, xs)] = xh @ a / np.sqrt(nu)[None, :]
    s[np.ix_(ps, ps)] = ph @ b / np.sqrt(nu)[None, :]
    return s, nu


def _williamson_generic(g: np.ndarray):
    n = g.shape[0] // 2
    gh = _sqrtm_sym(g)
    m = gh @ omega(n) @ gh
    m = 0.5 * (m - m.T)
    t, q = scipy.linalg.schur(m, output="real")
    # t is antisymmetric block diagonal; orient blocks to [[0, nu], [-nu, 0]].
    nu = np.empty(n)
    for j in range(n):
        val = t[2 * j, 2 * j + 1]
        if val < 0:
            q[:, [2 * j, 2 * j + 1]] = q[:, [2 * j + 1, 2 * j]]
            val = -val
        nu[j] = val
    order = np.argsort(-nu)
    nu = nu[order]
    cols = np.concatenate([[2 * j, 2 * j + 1] for j in order])
    q = q[:, cols]
    s = gh @ q / np.sqrt(np.repeat(nu, 2))[None, :]
    return s, nu


# ---------------------------------------------------------------------------
# Euler (passive-squeeze-passive) factorization


@dataclass(frozen=True)
class BlochMessiahResult:
    """S = V R U with U, V orthogonal symplectic and R diagonal squeezing."""

    u: np.ndarray
    r: np.ndarray
    v: np.ndarray

    @property
    def x_scales(self) -> np.ndarray:
        return np.diag(self.r)[0::2].copy()

    @property
    def squeeze_factors(self) -> np.ndarray:
        """Per-mode min(r, 1/r), always <= 1."""
        d = self.x_scales
        return np.minimum(d, 1.0 / d)


def squeezing_db(s: float) -> float:
    """Squeeze factor in decibels, 10 log10(s^2)."""
    return float(10.0 * np.log10(s * s))


def bloch_messiah(s: np.ndarray) -> BlochMessiahResult:
    """Factor a symplectic matrix into passive, squeezing, passive stages.

    For phase-free S the factors come from an SVD of the x sector and are
    themselves phase-free, with squeezers ordered by increasing x scale;
    general S goes through the polar decomposition, pairing reciprocal
    eigenvalues of the symmetric factor.
    """
    s = np.asarray(s, dtype=float)
    n = s.shape[0] // 2
    if s.shape != (2 * n, 2 * n) or symplectic_residual(s) > RECON_TOL:
        raise ValueError("input is not symplectic")
    xs, ps = _xs_ps(n)
    phase_free = np.max(np.abs(s[np.ix_(xs, ps)])) < 1e-12 and \
        np.max(np.abs(s[np.ix_(ps, xs)])) < 1e-12
    if phase_free:
        u, r, v = _bm_phase_free(s, n)
    else:
        u, r, v = _bm_general(s, n)
    if np.max(np.abs(v @ r @ u - s)) > RECON_TOL:
        raise ArithmeticError("passive-squeeze-passive reconstruction failed")
    return BlochMessiahResult(u=u, r=r, v=v)


def _bm_phase_free(s: np.ndarray, n: int):
    xs, _ = _xs_ps(n)
    sx = s[np.ix_(xs, xs)]
    wm, sig, vt = np.linalg.svd(sx)
    order = np.argsort(sig)  # wire 1 carries the strongest x squeezing
    sig = sig[order]
    v3 = wm[:, order]
    u3 = vt[order, :]
    r = np.diag(np.ravel([(t, 1.0 / t) for t in sig]))
    return expand_phase_free(u3), r, expand_phase_free(v3)


def _bm_general(s: np.ndarray, n: int):
    w = omega(n)
    p = _sqrtm_sym(s @ s.T)
    o = np.linalg.solve(p, s)
    lam, vec = np.linalg.eigh(p)
    used = np.zeros(len(lam), dtype=bool)
    pairs = []
    # Eigenvalues above 1 pair with their reciprocals via v -> -Omega v.
    for idx in np.argsort(-lam):
        if used[idx] or lam[idx] <= 1.0 + 1e-9:
            continue
        v = vec[:, idx]
        u = -w @ v
        # mark the reciprocal eigenvector(s) this u lives in as used
        recb = np.abs(lam - 1.0 / lam[idx]) < 1e-7
        for jdx in np.where(recb)[0]:
            if not used[jdx] and abs(vec[:, jdx] @ u) > 1e-7:
                used[jdx] = True
        used[idx] = True
        pairs.append((lam[idx], v, u))
    # Remaining directions belong to the unit eigenspace: pair greedily.
    rest = vec[:, ~used]
    basis = [rest[:, k] for k in range(rest.shape[1])]
    while basis:
        e = basis[0]
        e = e / np.linalg.norm(e)
        f = -w @ e
        pairs.append((1.0, e, f))
        nxt = []
        for g in basis[1:]:
            g = g - (g @ e) * e - (g @ f) * f
            if np.linalg.norm(g) > 1e-9:
                nxt.append(g / np.linalg.norm(g))
        basis = nxt
    if len(pairs) != n:
        raise ArithmeticError("reciprocal-pair matching failed")
    v_cols = np.empty((2 * n, 2 * n))
    r = np.empty(2 * n)
    for j, (ell, v, u) in enumerate(pairs):
        v_cols[:, 2 * j] = v
        v_cols[:, 2 * j + 1] = u
        r[2 * j] = ell
        r[2 * j + 1] = 1.0 / ell
    rmat = np.diag(r)
    u_fac = v_cols.T @ o
    return u_fac, rmat, v_cols


# ---------------------------------------------------------------------------
# Beam-splitter arrays (three modes, fixed sign conventions)

PAIRS = ((0, 1), (0, 2), (1, 2))
# Factor order in the matrix product; the rightmost factor acts first.
PRODUCT_ORDER = {"U": ((1, 2), (0, 2), (0, 1)), "V": ((0, 1), (0, 2), (1, 2))}
SIGNS3 = tuple(itertools.product((1.0, -1.0), repeat=3))


def beam_splitter_mode_matrix(side: str, pair: tuple[int, int], t: float) -> np.ndarray:
    """3x3 orthogonal acting on mode space; reflectivity sqrt(1 - t^2)."""
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"transmissivity must lie in [0, 1], got {t}")
    r = np.sqrt(max(0.0, 1.0 - t * t))
    if side == "U":
        if pair == (0, 1):
            return np.array([[t, r, 0.0], [r, -t, 0.0], [0.0, 0.0, -1.0]])
        if pair == (0, 2):
            return np.array([[t, 0.0, r], [0.0, 1.0, 0.0], [r, 0.0, -t]])
        if pair == (1, 2):
            return np.array([[1.0, 0.0, 0.0], [0.0, -t, -r], [0.0, r, -t]])
    elif side == "V":
        if pair == (0, 1):
            return np.array([[t, r, 0.0], [r, -t, 0.0], [0.0, 0.0, 1.0]])
        if pair == (0, 2):
            return np.array([[-t, 0.0, r], [0.0, 1.0, 0.0], [-r, 0.0, -t]])
        if pair == (1, 2):
            return np.array([[1.0, 0.0, 0.0], [0.0, t, r], [0.0, r, -t]])
    raise ValueError(f"unknown beam splitter ({side}, {pair})")


def beam_splitter_matrix(side: str, pair: tuple[int, int], t: float) -> np.ndarray:
    """Quadrature-space (6x6) beam splitter, identical on x and p sectors."""
    return expand_phase_free(beam_splitter_mode_matrix(side, pair, t))


@dataclass(frozen=True)
class ReckStage:
    """One passive stage as an ordered beam-splitter array plus sign factors.

    ``product() = diag(output_signs) . B_a B_b B_c . diag(input_signs)`` with
    the factors in the side's conventional product order (rightmost first).
    """

    side: str
    transmissivities: dict[tuple[int, int], float]
    input_signs: tuple[float, float, float] = (1.0, 1.0, 1.0)
    output_signs: tuple[float, float, float] = (1.0, 1.0, 1.0)

    def factors(self) -> list[tuple[tuple[int, int], float]]:
        return [(pair, self.transmissivities[pair]) for pair in PRODUCT_ORDER[self.side]]

    def mode_product(self) -> np.ndarray:
        prod = np.diag(self.output_signs)
        for pair, t in self.factors():
            prod = prod @ beam_splitter_mode_matrix(self.side, pair, t)
        return prod @ np.diag(self.input_signs)

    def product(self) -> np.ndarray:
        return expand_phase_free(self.mode_product())


def _bs_chain(side: str, ts: dict[tuple[int, int], float]) -> np.ndarray:
    prod = np.eye(3)
    for pair in PRODUCT_ORDER[side]:
        prod = prod @ beam_splitter_mode_matrix(side, pair, ts[pair])
    return prod


def _extract_transmissivities(p: np.ndarray, side: str) -> dict[tuple[int, int], float]:
    clip = lambda v: float(min(1.0, max(0.0, v)))
    if side == "U":
        r_ac = clip(abs(p[0, 2]))
        t_ac = np.sqrt(1.0 - r_ac * r_ac)
        if t_ac < 1e-12:
            return {(0, 1): 1.0, (0, 2): 0.0, (1, 2): clip(abs(p[2, 1]))}
        return {
            (0, 1): clip(abs(p[0, 0]) / t_ac),
            (0, 2): clip(t_ac),
            (1, 2): clip(abs(p[2, 2]) / t_ac),
        }
    r_ac = clip(abs(p[2, 0]))
    t_ac = np.sqrt(1.0 - r_ac * r_ac)
    if t_ac < 1e-12:
        return {(0, 1): 1.0, (0, 2): 0.0, (1, 2): clip(abs(p[1, 2]))}
    return {
        (0, 1): clip(abs(p[0, 0]) / t_ac),
        (0, 2): clip(t_ac),
        (1, 2): clip(abs(p[2, 2]) / t_ac),
    }


def reck_decompose(o: np.ndarray, side: str) -> ReckStage:
    """Factor a phase-free orthogonal symplectic (N=3) into three beam splitters.

    Searches the +-1 diagonal gauge on both sides for an exact factorization,
    preferring no output-side signs; any residual sign factors are recorded in
    the returned stage so its product reconstructs the input exactly.  Inputs
    with x-p mixing, or orthogonals outside the fixed-sign array's range, are
    rejected.
    """
    if side not in ("U", "V"):
        raise ValueError(f"side must be 'U' or 'V', got {side!r}")
    o = np.asarray(o, dtype=float)
    if o.shape == (3, 3):
        o3 = o
    elif o.shape == (6, 6):
        xs, ps = _xs_ps(3)
        if np.max(np.abs(o[np.ix_(xs, ps)])) > 1e-10 or \
                np.max(np.abs(o[np.ix_(ps, xs)])) > 1e-10:
            raise UnsupportedDecomposition("x-p mixing passives are unsupported")
        o3 = o[np.ix_(xs, xs)]
        if np.max(np.abs(o[np.ix_(ps, ps)] - o3)) > 1e-10:
            raise UnsupportedDecomposition("x and p sectors differ")
    else:
        raise ValueError(f"expected a 3x3 or 6x6 matrix, got {o.shape}")
    if np.max(np.abs(o3 @ o3.T - np.eye(3))) > 1e-8:
        raise ValueError("input is not orthogonal")

    best = None
    for dl in SIGNS3:
        for dr in SIGNS3:
            p = np.diag(dl) @ o3 @ np.diag(dr)
            ts = _extract_transmissivities(p, side)
            resid = float(np.max(np.abs(_bs_chain(side, ts) - p)))
            key = (resid > RECON_TOL, dl != (1.0, 1.0, 1.0), resid)
            if best is None or key < best[0]:
                best = (key, ts, dl, dr, resid)
    _, ts, dl, dr, resid = best
    if resid > RECON_TOL:
        raise UnsupportedDecomposition(
            f"orthogonal outside the beam-splitter array's range (residual {resid:.2e})"
        )
    # o3 = diag(dl) P diag(dr) with diag factors their own inverses.
    return ReckStage(side=side, transmissivities=ts, input_signs=dr, output_signs=dl)


# ---------------------------------------------------------------------------
# Circuits


@dataclass
class CircuitSpec:
    """Ordered Gaussian elements; the first list entry acts first."""

    n_modes: int
    elements: list[dict] = field(default_factory=list)


def simulate(circuit: CircuitSpec) -> CovarianceMatrix:
    """Propagate vacuum (or declared thermal inputs) through the elements.

    Symplectic elements act as gamma -> T gamma T^T; correlated classical
    displacements add twice their classical covariance.
    """
    n = circuit.n_modes
    gamma = np.eye(2 * n)
    for pos, el in enumerate(circuit.elements):
        kind = el.get("type")
        if kind == "inputs":
            if pos != 0:
                raise ValueError("'inputs' element must come first")
            nu = np.asarray(el["nu"], dtype=float)
            if nu.shape != (n,) or np.any(nu < 1.0 - 1e-12):
                raise ValueError("thermal inputs need one nu >= 1 per mode")
            gamma = np.diag(np.repeat(nu, 2))
        elif kind == "bs":
            if n != 3:
                raise ValueError("beam-splitter elements are defined for 3 modes")
            t = beam_splitter_matrix(el["side"], tuple(el["pair"]), float(el["t"]))
            gamma = t @ gamma @ t.T
        elif kind == "squeezer":
            j = int(el["mode"])
            sx = float(el["x_scale"])
            if not 0 <= j < n or sx <= 0:
                raise ValueError(f"bad squeezer element {el}")
            t = np.eye(2 * n)
            t[2 * j, 2 * j] = sx
            t[2 * j + 1, 2 * j + 1] = 1.0 / sx
            gamma = t @ gamma @ t.T
        elif kind == "displace":
            alpha = np.asarray(el["alpha"], dtype=float)
            beta = np.asarray(el["beta"], dtype=float)
            var = float(el["var"])
            if alpha.shape != (n,) or beta.shape != (n,) or var < 0:
                raise ValueError(f"bad displacement element {el}")
            xs, ps = _xs_ps(n)
            add = np.zeros_like(gamma)
            add[np.ix_(xs, xs)] = 2.0 * var * np.outer(alpha, alpha)
            add[np.ix_(ps, ps)] = 2.0 * var * np.outer(beta, beta)
            gamma = gamma + add
        elif kind == "signs":
            signs = np.asarray(el["signs"], dtype=float)
            if signs.shape != (n,) or np.any(np.abs(signs) != 1.0):
                raise ValueError(f"bad sign element {el}")
            d = np.repeat(signs, 2)
            gamma = gamma * np.outer(d, d)
        else:
            raise ValueError(f"unknown circuit element type {kind!r}")
    return CovarianceMatrix(n, gamma)


def _stage_elements(stage: ReckStage) -> list[dict]:
    els = []
    if stage.input_signs != (1.0, 1.0, 1.0):
        els.append({"type": "signs", "signs": list(stage.input_signs)})
    for pair, t in reversed(stage.factors()):  # rightmost factor acts first
        els.append({"type": "bs", "side": stage.side, "pair": list(pair), "t": float(t)})
    if stage.output_signs != (1.0, 1.0, 1.0):
        els.append({"type": "signs", "signs": list(stage.output_signs)})
    return els


def compile_circuit(gamma: CovarianceMatrix, simplified: bool = False) -> CircuitSpec:
    """Compile a 3-mode phase-free covariance matrix into a preparation circuit.

    Full mode: thermal inputs -> input beam-splitter array -> squeezers ->
    output array.  Simplified mode: squeezed vacua -> correlated displacements
    standing in for the dominant thermal input -> output array (the input
    array, acting on vacua, is dropped).
    """
    if gamma.n_modes != 3:
        raise ValueError("circuit compilation is defined for 3 modes")
    if has_xp_correlations(gamma, tol=0.0):
        raise UnsupportedDecomposition("states with x-p correlations are unsupported")
    if np.max(np.abs(gamma.matrix - np.eye(6))) <= 1e-12:
        return CircuitSpec(n_modes=3, elements=[])

    wres = williamson(gamma)
    bm = bloch_messiah(wres.s)
    xs, _ = _xs_ps(3)
    u3 = bm.u[np.ix_(xs, xs)]
    v3 = bm.v[np.ix_(xs, xs)]
    sig = bm.x_scales

    chosen = None
    for perm in itertools.permutations(range(3)):
        perm = list(perm)
        try:
            stage_v = reck_decompose(v3[:, perm], "V")
        except UnsupportedDecomposition:
            continue
        u3_wired = np.diag(stage_v.input_signs) @ u3[perm, :]
        try:
            stage_u = reck_decompose(u3_wired, "U")
        except UnsupportedDecomposition:
            continue
        stage_v = ReckStage(
            side="V",
            transmissivities=stage_v.transmissivities,
            input_signs=(1.0, 1.0, 1.0),  # absorbed into the input stage
            output_signs=stage_v.output_signs,
        )
        score = (
            stage_v.output_signs != (1.0, 1.0, 1.0),
            stage_u.output_signs != (1.0, 1.0, 1.0),
            perm != sorted(perm),
        )
        if chosen is None or score < chosen[0]:
            chosen = (score, perm, stage_u, stage_v)
        if score == (False, False, False):
            break
    if chosen is None:
        raise UnsupportedDecomposition("no beam-splitter factorization found")
    _, perm, stage_u, stage_v = chosen
    sig = sig[perm]
    nu = wres.nu

    squeezers = [
        {"type": "squeezer", "mode": j, "x_scale": float(sig[j])} for j in range(3)
    ]

    if not simplified:
        elements = [{"type": "inputs", "nu": [float(v) for v in nu]}]
        elements += _stage_elements(stage_u)
        elements += squeezers
        elements += _stage_elements(stage_v)
        return CircuitSpec(n_modes=3, elements=elements)

    # Push the dominant (first) thermal input through the input array and the
    # squeezers; remaining inputs are approximated by vacua.
    u_eff = stage_u.mode_product()  # includes any recorded sign factors
    alpha = sig * u_eff[:, 0]
    beta = (1.0 / sig) * u_eff[:, 0]
    var = (float(nu[0]) - 1.0) / 2.0
    elements = list(squeezers)
    elements.append({
        "type": "displace",
        "alpha": [float(a) for a in alpha],
        "beta": [float(b) for b in beta],
        "var": var,
    })
    elements += _stage_elements(stage_v)
    return CircuitSpec(n_modes=3, elements=elements)


def round_parameters(circuit: CircuitSpec, decimals: int = 3) -> CircuitSpec:
    """Circuit with every continuous parameter rounded (reporting convention).

    Squeezers are rounded on their squeeze factor min(r, 1/r), matching how
    the parameters are reported.
    """
    out = []
    for el in circuit.elements:
        el = dict(el)
        if "x_scale" in el:
            sx = el["x_scale"]
            if sx <= 1.0:
                el["x_scale"] = round(sx, decimals)
            else:
                el["x_scale"] = 1.0 / round(1.0 / sx, decimals)
        for key in ("t", "var"):
            if key in el:
                el[key] = round(el[key], decimals)
        for key in ("nu", "alpha", "beta"):
            if key in el:
                el[key] = [round(v, decimals) for v in el[key]]
        out.append(el)
    return CircuitSpec(n_modes=circuit.n_modes, elements=out)


def noise_tolerance(gamma: CovarianceMatrix, tree, resolution: float = 0.005,
                    options=None) -> float:
    """Largest isotropic noise p with the blind witness still negative.

    Scans gamma + p*I by doubling then bisection at the given resolution;
    marginal separability only improves with p, so the witness value is the
    single thing to track.  Returns 0.0 when already undetected at p = 0.
    """
    from .symplectic import add_noise
    from .witness import ENTANGLEMENT_TOL, gme_witness

    def detected(p: float) -> bool:
        return gme_witness(add_noise(gamma, p), tree, options).value < -ENTANGLEMENT_TOL

    if not detected(0.0):
        return 0.0
    lo, hi = 0.0, resolution * 4
    while detected(hi):
        lo, hi = hi, hi * 2.0
        if hi > 4.0:
            return lo
    while hi - lo > resolution:
        mid = 0.5 * (lo + hi)
        if detected(mid):
            lo = mid
        else:
            hi = mid
    return lo
