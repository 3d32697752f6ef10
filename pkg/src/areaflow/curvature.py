"""Algebra of curvature-type tensors in an orthonormal frame.

Everything here works on frame components: a curvature tensor is a 4-index
array R[i,j,k,l] with the symmetries of a Riemann tensor, and the sectional
curvature of the plane spanned by an orthonormal pair (e_i, e_j) is
R[i,j,j,i] (positive on round spheres).

Extremal quantities over non-coordinate frames (sectional range, the partial
Ricci minimum over 3-frames, the isotropic-curvature shift chi_ic1) are
computed by multi-start frame optimization: random orthonormal starts from QR
of Gaussian matrices, then projected gradient descent on the Stiefel manifold.
Results are deterministic under a fixed seed and exact in practice on the
homogeneous model spaces this library targets.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

ALG_TOL = 1e-12  # tolerance for exact algebraic identities


# ---------------------------------------------------------------------------
# value types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SymBilinear:
    """Symmetric 2-tensor in frame components (a metric, or g - h pullback)."""

    comp: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.comp, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("SymBilinear needs a square 2-index array")
        if not np.allclose(a, a.T, atol=ALG_TOL * max(1.0, abs(a).max())):
            raise ValueError("SymBilinear components are not symmetric")
        object.__setattr__(self, "comp", 0.5 * (a + a.T))

    @property
    def dim(self) -> int:
        return self.comp.shape[0]

    def is_metric(self) -> bool:
        return bool(np.linalg.eigvalsh(self.comp).min() > 0)

    @staticmethod
    def identity(dim: int) -> "SymBilinear":
        return SymBilinear(np.eye(dim))


@dataclass(frozen=True)
class CurvatureTensor:
    """Frame components of an algebraic curvature tensor.

    Invariants (checked on construction): antisymmetry in the first and last
    index pairs, pair symmetry R[ijkl] = R[klij], and the first Bianchi
    identity R[ijkl] + R[jkil] + R[kijl] = 0.
    """

    comp: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.comp, dtype=float)
        if a.ndim != 4 or len(set(a.shape)) != 1:
            raise ValueError("CurvatureTensor needs a 4-index hypercubic array")
        if a.shape[0] < 2:
            raise ValueError("CurvatureTensor needs dim >= 2")
        scale = max(1.0, abs(a).max())
        tol = 1e-12 * scale
        if abs(a + a.transpose(1, 0, 2, 3)).max() > tol:
            raise ValueError("not antisymmetric in the first index pair")
        if abs(a + a.transpose(0, 1, 3, 2)).max() > tol:
            raise ValueError("not antisymmetric in the last index pair")
        if abs(a - a.transpose(2, 3, 0, 1)).max() > tol:
            raise ValueError("pair symmetry R[ijkl] = R[klij] fails")
        bianchi = a + a.transpose(1, 2, 0, 3) + a.transpose(2, 0, 1, 3)
        if abs(bianchi).max() > tol:
            raise ValueError("first Bianchi identity fails")
        object.__setattr__(self, "comp", a)

    @property
    def dim(self) -> int:
        return self.comp.shape[0]

    @staticmethod
    def zero(dim: int) -> "CurvatureTensor":
        return CurvatureTensor(np.zeros((dim,) * 4))


@dataclass(frozen=True)
class CurvatureBounds:
    """Aggregated curvature extremes of a space.

    kappa/tau bound the sectional curvature, ric_* the Ricci eigenvalues,
    scal_* the scalar curvature, ric3_min the minimum over orthonormal
    triples {u,v,w} of K(u,v)+K(u,w), and chi_ic1 the largest constant-
    curvature shift keeping the tensor weakly inside the PIC1 cone.  For
    dim <= 3 the chi_ic1 slot carries the minimal Ricci eigenvalue instead
    (the low-dimensional convention for isotropic-curvature positivity).
    """

    dim: int
    kappa: float
    tau: float
    ric_min: float
    ric_max: float
    scal_min: float
    scal_max: float
    ric3_min: float
    chi_ic1: float
    einstein_const: float | None = None

    def __post_init__(self):
        if self.kappa > self.tau + 1e-12:
            raise ValueError("kappa must not exceed tau")
        if self.ric_min > self.ric_max + 1e-12:
            raise ValueError("ric_min must not exceed ric_max")
        if self.scal_min > self.scal_max + 1e-12:
            raise ValueError("scal_min must not exceed scal_max")
        if self.dim >= 3 and np.isfinite(self.ric3_min):
            if self.ric3_min < 2.0 * self.kappa - 1e-9 * max(1.0, abs(self.kappa)):
                raise ValueError("ric3_min below 2*kappa is inconsistent")

    def scaled(self, factor: float) -> "CurvatureBounds":
        """Bounds after scaling the metric by 1/factor (curvature x factor)."""
        e = None if self.einstein_const is None else self.einstein_const * factor
        return CurvatureBounds(
            dim=self.dim,
            kappa=self.kappa * factor,
            tau=self.tau * factor,
            ric_min=self.ric_min * factor,
            ric_max=self.ric_max * factor,
            scal_min=self.scal_min * factor,
            scal_max=self.scal_max * factor,
            ric3_min=self.ric3_min * factor,
            chi_ic1=self.chi_ic1 * factor,
            einstein_const=e,
        )

    def to_dict(self) -> dict:
        d = {
            "dim": self.dim,
            "kappa": self.kappa,
            "tau": self.tau,
            "ric_min": self.ric_min,
            "ric_max": self.ric_max,
            "scal_min": self.scal_min,
            "scal_max": self.scal_max,
            "ric3_min": self.ric3_min,
            "chi_ic1": self.chi_ic1,
        }
        if self.einstein_const is not None:
            d["einstein_const"] = self.einstein_const
        return d


# ---------------------------------------------------------------------------
# basic operations
# ---------------------------------------------------------------------------


def kulkarni_nomizu(s: SymBilinear, t: SymBilinear) -> CurvatureTensor:
    """Kulkarni-Nomizu product of two symmetric 2-tensors.

    (S o T)(X,Y,Z,W) = S(X,W)T(Y,Z) + S(Y,Z)T(X,W)
                       - S(X,Z)T(Y,W) - S(Y,W)T(X,Z)

    For a metric g, (g o g)(X,Y,Y,X) is twice the squared area of the
    parallelogram spanned by X, Y; so (1/2) g o g is the unit-curvature
    tensor.
    """
    if s.dim != t.dim:
        raise ValueError(f"dimension mismatch: {s.dim} vs {t.dim}")
    a, b = s.comp, t.comp
    comp = (
        np.einsum("il,jk->ijkl", a, b)
        + np.einsum("jk,il->ijkl", a, b)
        - np.einsum("ik,jl->ijkl", a, b)
        - np.einsum("jl,ik->ijkl", a, b)
    )
    return CurvatureTensor(comp)


def constant_curvature_tensor(dim: int, c: float) -> CurvatureTensor:
    """c times (1/2) g o g for the identity metric: sectional curvature c."""
    g = SymBilinear.identity(dim)
    return CurvatureTensor(0.5 * c * kulkarni_nomizu(g, g).comp)


def sectional(r: CurvatureTensor, i: int, j: int) -> float:
    """Sectional curvature of the coordinate plane (e_i, e_j), i != j."""
    if i == j:
        raise ValueError("sectional curvature needs two distinct directions")
    return float(r.comp[i, j, j, i])


def ricci_matrix(r: CurvatureTensor) -> np.ndarray:
    """Ricci tensor as a symmetric matrix: Ric[i,j] = sum_k R[i,k,k,j]."""
    return np.einsum("ikkj->ij", r.comp)


def scalar_curvature(r: CurvatureTensor) -> float:
    return float(np.trace(ricci_matrix(r)))


def product_curvature(rg: CurvatureTensor, rh: CurvatureTensor) -> CurvatureTensor:
    """Curvature of a Riemannian product: pure blocks, vanishing mixed terms."""
    m, n = rg.dim, rh.dim
    comp = np.zeros((m + n,) * 4)
    comp[:m, :m, :m, :m] = rg.comp
    comp[m:, m:, m:, m:] = rh.comp
    return CurvatureTensor(comp)


def pic1_defect(r: CurvatureTensor, frame4: np.ndarray, mu: float) -> float:
    """Isotropic-curvature combination on an orthonormal 4-frame.

    Returns R_1331 + mu^2 R_1441 + R_2332 + mu^2 R_2442 - 2 mu R_1234 with
    components taken in the given frame (rows of ``frame4``).  Positivity of
    this quantity for every frame and mu in [0,1] places the tensor strictly
    inside the PIC1 cone.
    """
    f = np.asarray(frame4, dtype=float)
    if r.dim < 4:
        raise ValueError("pic1_defect needs dim >= 4")
    if f.shape != (4, r.dim):
        raise ValueError("frame4 must be a (4, dim) array of row vectors")
    if abs(f @ f.T - np.eye(4)).max() > 1e-10:
        raise ValueError("frame4 is not orthonormal (tol 1e-10)")
    if not 0.0 <= mu <= 1.0:
        raise ValueError("mu must lie in [0, 1]")
    k13, k14, k23, k24, r1234 = _pic1_components(r.comp, f[None])
    return float(k13[0] + mu**2 * k14[0] + k23[0] + mu**2 * k24[0] - 2 * mu * r1234[0])


def _pic1_components(comp, frames):
    """Batched components feeding the PIC1 defect.

    ``frames``: (B, 4, dim) row-vector frames.  Returns the five contractions
    (K13, K14, K23, K24, R_1234) as (B,) arrays.
    """
    f1, f2, f3, f4 = frames[:, 0], frames[:, 1], frames[:, 2], frames[:, 3]

    def sec(a, b):
        return np.einsum("ijkl,bi,bj,bk,bl->b", comp, a, b, b, a, optimize=True)

    k13 = sec(f1, f3)
    k14 = sec(f1, f4)
    k23 = sec(f2, f3)
    k24 = sec(f2, f4)
    r1234 = np.einsum("ijkl,bi,bj,bk,bl->b", comp, f1, f2, f3, f4, optimize=True)
    return k13, k14, k23, k24, r1234


def _pic1_ratio(comp, frames):
    """min over mu in [0,1] of defect / (2(1+mu^2)), batched over frames.

    For fixed frame the defect is p + q mu^2 - 2 r mu with p = K13+K23,
    q = K14+K24, r = R_1234; the normalized ratio has interior critical
    points at the roots of r mu^2 + (q-p) mu - r = 0.
    """
    k13, k14, k23, k24, r1234 = _pic1_components(comp, frames)
    p = k13 + k23
    q = k14 + k24
    r = r1234

    def ratio(mu):
        return (p + q * mu**2 - 2.0 * r * mu) / (2.0 * (1.0 + mu**2))

    best = np.minimum(ratio(np.zeros_like(p)), ratio(np.ones_like(p)))
    disc = np.sqrt((q - p) ** 2 + 4.0 * r**2)
    with np.errstate(divide="ignore", invalid="ignore"):
        for sign in (+1.0, -1.0):
            mu = (-(q - p) + sign * disc) / (2.0 * r)
            mu = np.where((r != 0) & (mu > 0.0) & (mu < 1.0), mu, 0.0)
            best = np.minimum(best, ratio(mu))
    return best


# ---------------------------------------------------------------------------
# frame optimization
# ---------------------------------------------------------------------------


def _qr_frames(mats: np.ndarray) -> np.ndarray:
    """Orthonormalize a batch of (dim, k) matrices, sign-fixed for continuity."""
    q, r = np.linalg.qr(mats)
    d = np.sign(np.einsum("...ii->...i", r))
    d = np.where(d == 0, 1.0, d)
    return q * d[..., None, :]


def minimize_over_frames(
    objective,
    dim: int,
    k: int,
    *,
    n_starts: int = 64,
    seed: int = 0,
    structured=None,
    max_iter: int = 120,
    fd_eps: float = 1e-6,
    tol: float = 1e-13,
):
    """Minimize a batched objective over orthonormal k-frames in dim space.

    ``objective`` maps a (B, dim, k) batch of column-orthonormal frames to a
    (B,) array.  Descent runs all random starts in lockstep: a central
    difference gradient in the ambient matrix entries (one batched objective
    call), a QR retraction, and per-start backtracking; converged starts drop
    out of the batch.  ``structured`` frames are evaluated but not descended
    (they are exact candidates such as coordinate frames).  Deterministic
    under ``seed``; ties resolve to the lowest start index.

    Returns (best_value, best_frame with columns as the frame vectors).
    """
    rng = np.random.default_rng(seed)
    x = _qr_frames(rng.standard_normal((n_starts, dim, k)))
    fx = objective(x)
    best_struct = None
    if structured is not None and len(structured):
        s = _qr_frames(np.asarray(structured, dtype=float))
        fs = objective(s)
        j = int(np.argmin(fs))
        best_struct = (float(fs[j]), s[j])

    npar = dim * k
    lr = np.full(n_starts, 0.1)
    active = np.ones(n_starts, dtype=bool)
    basis = np.eye(npar).reshape(npar, dim, k)
    offsets = fd_eps * np.concatenate([basis, -basis])

    for _ in range(max_iter):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        xa = x[idx]
        pert = (xa[:, None] + offsets[None]).reshape(-1, dim, k)
        vals = objective(_qr_frames(pert)).reshape(idx.size, 2 * npar)
        step = ((vals[:, :npar] - vals[:, npar:]) / (2.0 * fd_eps)).reshape(idx.size, dim, k)
        improved = np.zeros(idx.size, dtype=bool)
        lra = lr[idx].copy()
        for _ in range(25):
            todo = np.flatnonzero(~improved)
            if todo.size == 0:
                break
            trial = _qr_frames(x[idx[todo]] - lra[todo, None, None] * step[todo])
            ft = objective(trial)
            ref = fx[idx[todo]]
            better = ft < ref - tol * np.maximum(1.0, np.abs(ref))
            hit = idx[todo[better]]
            x[hit] = trial[better]
            fx[hit] = ft[better]
            improved[todo[better]] = True
            lra[todo[~better]] *= 0.5
        lr[idx] = np.where(improved, lra * 1.5, lra)
        active[idx] = improved | (lra > 1e-12)
        if not improved.any():
            break
    i = int(np.argmin(fx))
    out = (float(fx[i]), x[i])
    if best_struct is not None and best_struct[0] <= out[0]:
        out = best_struct
    return out


def _axis_frames(dim: int, k: int, max_frames: int = 240) -> np.ndarray:
    """Coordinate-axis k-frames (ordered tuples of distinct axes) as starts."""
    from itertools import permutations

    eye = np.eye(dim)
    out = []
    for tup in permutations(range(dim), k):
        out.append(eye[:, list(tup)])
        if len(out) >= max_frames:
            break
    return np.array(out)


def sectional_range(r: CurvatureTensor, *, n_starts: int = 64, seed: int = 0):
    """(min, max) sectional curvature over all 2-planes, by frame optimization."""
    comp = r.comp
    structured = _axis_frames(r.dim, 2)

    def obj(sign):
        def f(frames):
            a, b = frames[:, :, 0], frames[:, :, 1]
            return sign * np.einsum("ijkl,bi,bj,bk,bl->b", comp, a, b, b, a, optimize=True)

        return f

    lo, _ = minimize_over_frames(obj(+1.0), r.dim, 2, n_starts=n_starts, seed=seed,
                                 structured=structured)
    hi, _ = minimize_over_frames(obj(-1.0), r.dim, 2, n_starts=n_starts, seed=seed + 1,
                                 structured=structured)
    return lo, -hi


def ric3_min(r: CurvatureTensor, *, n_starts: int = 64, seed: int = 0) -> float:
    """Minimum over orthonormal triples {u,v,w} of K(u,v) + K(u,w).

    This is the smallest partial Ricci value over 3-dimensional subspaces:
    the quantity bounding the chi entries of the Ricci-flow-coupled
    conditions.  Always >= 2 * (sectional minimum); equality at constant
    curvature.
    """
    if r.dim < 3:
        raise ValueError("ric3_min needs dim >= 3")
    comp = r.comp

    def f(frames):
        u, v, w = frames[:, :, 0], frames[:, :, 1], frames[:, :, 2]
        kuv = np.einsum("ijkl,bi,bj,bk,bl->b", comp, u, v, v, u, optimize=True)
        kuw = np.einsum("ijkl,bi,bj,bk,bl->b", comp, u, w, w, u, optimize=True)
        return kuv + kuw

    val, _ = minimize_over_frames(f, r.dim, 3, n_starts=n_starts, seed=seed,
                                  structured=_axis_frames(r.dim, 3))
    return val


def chi_ic1(
    r: CurvatureTensor,
    g: SymBilinear | None = None,
    *,
    n_starts: int = 64,
    seed: int = 0,
) -> float:
    """Largest s with R - s * (1/2) g o g weakly inside the PIC1 cone.

    Because the defect is linear in the tensor and the defect of (1/2) g o g
    equals 2(1+mu^2) on every orthonormal frame, this supremum is the infimum
    over frames and mu of defect / (2(1+mu^2)); the infimum is estimated by
    multi-start projected gradient descent with mu handled in closed form.

    dim 3 is refused: isotropic-curvature positivity degenerates to Ricci
    positivity there, and callers should compare the minimal Ricci eigenvalue
    instead (``bounds_of`` does this automatically).
    """
    if r.dim == 3:
        raise ValueError("chi_ic1 is undefined in dim 3; use the minimal Ricci "
                         "eigenvalue (Ricci-positivity convention)")
    if r.dim < 4:
        raise ValueError("chi_ic1 needs dim >= 4")
    comp = _orthonormalize_tensor(r, g)

    def f(frames):
        return _pic1_ratio(comp, np.swapaxes(frames, 1, 2))

    # axis frames plus their single-sign flips: catches Kaehler-type equality
    # frames such as (e1, Je1, e2, -Je2) on symmetric model spaces
    axes = _axis_frames(r.dim, 4, max_frames=120)
    flips = axes.copy()
    flips[:, :, 3] *= -1.0
    val, _ = minimize_over_frames(
        f, r.dim, 4, n_starts=n_starts, seed=seed,
        structured=np.concatenate([axes, flips]),
    )
    return val


def _orthonormalize_tensor(r: CurvatureTensor, g: SymBilinear | None) -> np.ndarray:
    """Components of r in a g-orthonormal frame (identity g: no-op)."""
    if g is None:
        return r.comp
    if g.dim != r.dim:
        raise ValueError("metric dimension mismatch")
    gm = g.comp
    if np.allclose(gm, np.eye(r.dim), atol=1e-14):
        return r.comp
    if not g.is_metric():
        raise ValueError("g must be positive definite")
    # columns of L^{-T} (g = L L^T) form a g-orthonormal frame
    basis = np.linalg.inv(np.linalg.cholesky(gm)).T
    return np.einsum("ijkl,ia,jb,kc,ld->abcd", r.comp, basis, basis, basis, basis,
                     optimize=True)


def bounds_of(
    r: CurvatureTensor,
    g: SymBilinear | None = None,
    *,
    n_starts: int = 64,
    seed: int = 0,
    einstein_const: float | None = None,
) -> CurvatureBounds:
    """Aggregate curvature extremes of a frame tensor.

    Ricci and scalar data are exact (eigenvalues of the contracted tensor);
    sectional, ric3 and chi extremes come from seeded frame optimization and
    are reported to the accuracy the optimizer achieved.
    """
    comp = _orthonormalize_tensor(r, g)
    rr = CurvatureTensor(comp)
    kappa, tau = sectional_range(rr, n_starts=n_starts, seed=seed)
    ric_eigs = np.linalg.eigvalsh(ricci_matrix(rr))
    scal = float(ric_eigs.sum())
    if rr.dim >= 3:
        r3 = ric3_min(rr, n_starts=n_starts, seed=seed + 2)
    else:
        r3 = float("nan")
    if rr.dim >= 4:
        chi = chi_ic1(rr, n_starts=n_starts, seed=seed + 3)
    else:
        chi = float(ric_eigs.min())  # low-dimensional Ricci convention
    return CurvatureBounds(
        dim=rr.dim,
        kappa=kappa,
        tau=tau,
        ric_min=float(ric_eigs.min()),
        ric_max=float(ric_eigs.max()),
        scal_min=scal,
        scal_max=scal,
        ric3_min=r3,
        chi_ic1=chi,
        einstein_const=einstein_const,
    )
