"""Desk-scale time integration of the graphical flow in two reductions.

Both cases integrate the reparametrized (strictly parabolic) form of the
graph flow, in which the domain components stay the identity and the map
itself evolves:

* periodic flat tori: d/dt f^a = eta^{ij} d_i d_j f^a with
  eta = I + df^T df assembled pointwise (all background Christoffel terms
  vanish on flat factors);

* equivariant sphere suspensions f(theta, xi) = (rho(theta), xi) between
  round spheres of radii r_M, r_N:

      rho_t = rho'' / (r_M^2 + r_N^2 rho'^2)
            + (m-1) (sin th cos th rho' - sin rho cos rho)
                    / (r_M^2 sin^2 th + r_N^2 sin^2 rho)

  where the radii may shrink homothetically (r(t) = r(0) sqrt(1 - L t)).

Monitors record the area monitor (infimum of the smallest Theta eigenvalue),
the largest stretch, the largest pairwise stretch product, background scale
factors, and a residual: for tori the discrete defect of the evolution
identity (d/dt - eta^{ij} d_i d_j) tr_eta S = sum_i term_I, for the
equivariant case the sup-norm of the discrete right-hand side (stationarity
defect).  Time stepping is explicit Heun with a CFL-limited step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, asdict

import numpy as np

from .profile import s_of
from .spaces import BackgroundPath, ModelSpace

LAMBDA_ABORT = 50.0
COND_ABORT = 1e6


class FlowAbort(RuntimeError):
    """Raised when a run leaves the graphical regime it can control."""


@dataclass
class FlowSeries:
    times: list = field(default_factory=list)
    m_of_t: list = field(default_factory=list)
    lambda_max: list = field(default_factory=list)
    max_product: list = field(default_factory=list)
    residual: list = field(default_factory=list)
    scale_m: list = field(default_factory=list)
    scale_n: list = field(default_factory=list)
    abort_reason: str | None = None
    meta: dict = field(default_factory=dict)

    CSV_HEADER = "t,m_of_t,lambda_max,max_product,residual,scaleM,scaleN"

    def append(self, t, m_of, lmax, prod, res, sm, sn):
        self.times.append(float(t))
        self.m_of_t.append(float(m_of))
        self.lambda_max.append(float(lmax))
        self.max_product.append(float(prod))
        self.residual.append(float(res))
        self.scale_m.append(float(sm))
        self.scale_n.append(float(sn))

    def rows(self):
        for vals in zip(self.times, self.m_of_t, self.lambda_max,
                        self.max_product, self.residual, self.scale_m, self.scale_n):
            yield vals


# ---------------------------------------------------------------------------
# flat torus
# ---------------------------------------------------------------------------


@dataclass
class TorusFlowState:
    """Map between flat tori: f(x) = lin @ x + u(x), u periodic.

    ``lin`` is an integer winding matrix (the homotopy data, constant in
    time); ``u`` has shape (n, N, ..., N) with m grid axes of period
    ``period``.  Splitting off the linear part keeps every stored field
    periodic, so centered stencils never see the winding jump.
    """

    m: int
    n: int
    period: float
    lin: np.ndarray
    u: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        self.lin = np.asarray(self.lin, dtype=float)
        self.u = np.asarray(self.u, dtype=float)
        if self.lin.shape != (self.n, self.m):
            raise ValueError("lin must be n x m")
        if self.u.ndim != self.m + 1 or self.u.shape[0] != self.n:
            raise ValueError("u must have shape (n, grid...)")

    @property
    def h(self) -> float:
        return self.period / self.u.shape[1]


def _d1(a, axis, h):
    return (np.roll(a, -1, axis) - np.roll(a, 1, axis)) / (2.0 * h)


def _d2(a, axis, h):
    return (np.roll(a, -1, axis) - 2.0 * a + np.roll(a, 1, axis)) / h**2


def _torus_df(st: TorusFlowState) -> np.ndarray:
    """Differential field (n, m, grid...): winding part plus centered grads."""
    grads = np.stack([
        np.stack([_d1(st.u[a], ax, st.h) for ax in range(st.m)])
        for a in range(st.n)
    ])
    return st.lin.reshape(st.lin.shape + (1,) * st.m) + grads


def _torus_eta_inv(df: np.ndarray, m: int, *, guard: bool = False):
    """Inverse induced metric per grid point; optionally checks the guards."""
    eta = np.eye(m).reshape((m, m) + (1,) * (df.ndim - 2)) + np.einsum(
        "ai...,aj...->ij...", df, df)
    if m == 2:
        det = eta[0, 0] * eta[1, 1] - eta[0, 1] ** 2
        if det.min() <= 0:
            raise FlowAbort("induced metric lost positive definiteness")
        inv = np.stack([np.stack([eta[1, 1], -eta[0, 1]]),
                        np.stack([-eta[1, 0], eta[0, 0]])]) / det
    else:
        eta_p = np.moveaxis(eta, (0, 1), (-2, -1))
        if np.linalg.det(eta_p).min() <= 0:
            raise FlowAbort("induced metric lost positive definiteness")
        inv = np.moveaxis(np.linalg.inv(eta_p), (-2, -1), (0, 1))
    if guard:
        eigs = np.linalg.eigvalsh(np.moveaxis(eta, (0, 1), (-2, -1)))
        cond = float((eigs[..., -1] / eigs[..., 0]).max())
        if cond > COND_ABORT:
            raise FlowAbort(f"induced metric condition number {cond:.2e} beyond guard")
    return eta, inv


def torus_rhs(st: TorusFlowState) -> np.ndarray:
    df = _torus_df(st)
    _, inv = _torus_eta_inv(df, st.m)
    out = np.zeros_like(st.u)
    for i in range(st.m):
        for j in range(st.m):
            if i == j:
                hess = np.stack([_d2(st.u[a], i, st.h) for a in range(st.n)])
            else:
                hess = np.stack([_d1(_d1(st.u[a], i, st.h), j, st.h)
                                 for a in range(st.n)])
            out += inv[i, j] * hess
    return out


def torus_cfl_dt(st: TorusFlowState, cfl: float = 0.4) -> float:
    """Explicit-step limit: eta^{-1} <= 1 so the diffusion scale is h^2/(2m)."""
    return cfl * st.h**2 / (2.0 * st.m)


def torus_step(st: TorusFlowState, dt: float) -> TorusFlowState:
    """One Heun step of the quasilinear system with periodic wrap."""
    k1 = torus_rhs(st)
    mid = TorusFlowState(st.m, st.n, st.period, st.lin, st.u + dt * k1, st.t + dt)
    k2 = torus_rhs(mid)
    return TorusFlowState(st.m, st.n, st.period, st.lin,
                          st.u + 0.5 * dt * (k1 + k2), st.t + dt)


def torus_lambdas(st: TorusFlowState) -> np.ndarray:
    """Descending singular values per grid point, shape (points, m)."""
    df = _torus_df(st)
    pts = df.reshape(st.n, st.m, -1).transpose(2, 0, 1)
    w = np.linalg.eigvalsh(np.einsum("pai,paj->pij", pts, pts))
    return np.sqrt(np.clip(w, 0.0, None))[:, ::-1]


def torus_monitor(st: TorusFlowState):
    lam = torus_lambdas(st)
    s = s_of(lam)
    m_of = float((s[:, 0] + s[:, 1]).min())
    return m_of, float(lam.max()), float((lam[:, 0] * lam[:, 1]).max())


def _torus_sigma(st: TorusFlowState) -> np.ndarray:
    """tr_eta S = 2 tr(eta^{-1}) - m, the scalar whose evolution is checked."""
    df = _torus_df(st)
    _, inv = _torus_eta_inv(df, st.m)
    return 2.0 * np.einsum("ii...->...", inv) - st.m


def _torus_term_one(st: TorusFlowState) -> np.ndarray:
    """sum_i term_I at every grid point: 2 (S_ii + S_aa) |A[a,i,l]|^2 summed.

    The second fundamental form is assembled in coordinates,
    A_{kl} = (d_k d_l F - Gamma^p_{kl} d_p F), with the Christoffel symbols of
    the induced metric from centered differences, then contracted into the
    adapted graph frame built from a pointwise SVD of df.
    """
    m, n, h = st.m, st.n, st.h
    df = _torus_df(st)
    eta, inv = _torus_eta_inv(df, m)
    grid = st.u.shape[1:]
    p = int(np.prod(grid))

    hess = np.empty((n, m, m) + grid)
    for a in range(n):
        for i in range(m):
            for j in range(i, m):
                hij = (_d2(st.u[a], i, h) if i == j
                       else _d1(_d1(st.u[a], i, h), j, h))
                hess[a, i, j] = hess[a, j, i] = hij

    deta = np.empty((m, m, m) + grid)
    for k in range(m):
        for i in range(m):
            for j in range(i, m):
                dk = _d1(eta[i, j], k, h)
                deta[k, i, j] = deta[k, j, i] = dk

    dfp = df.reshape(n, m, p).transpose(2, 0, 1)            # (p, n, m)
    hessp = hess.reshape(n, m, m, p).transpose(3, 0, 1, 2)  # (p, n, m, m)
    invp = inv.reshape(m, m, p).transpose(2, 0, 1)
    detap = deta.reshape(m, m, m, p).transpose(3, 0, 1, 2)  # (p, k, i, j)
    # Gamma^a_{kl} = (1/2) inv[a,q] (deta[k,q,l] + deta[l,q,k] - deta[q,k,l])
    gammap = 0.5 * (np.einsum("paq,pkql->pakl", invp, detap, optimize=True)
                    + np.einsum("paq,plqk->pakl", invp, detap, optimize=True)
                    - np.einsum("paq,pqkl->pakl", invp, detap, optimize=True))

    uu, sv, vt = np.linalg.svd(dfp)
    ell = min(m, n)
    lam = np.zeros((p, m))
    lam[:, :ell] = sv[:, :ell]
    lam_t = np.zeros((p, n))
    lam_t[:, :ell] = sv[:, :ell]

    e_hat = vt / np.sqrt(1.0 + lam**2)[:, :, None]          # (p, i, coord k)
    nu_m = np.zeros((p, n, m))
    nu_m[:, :ell, :] = (-lam_t[:, :ell, None] * vt[:, :ell, :]
                        / np.sqrt(1.0 + lam_t[:, :ell, None] ** 2))
    nu_n = uu.transpose(0, 2, 1) / np.sqrt(1.0 + lam_t**2)[:, :, None]

    # <A_{kl}, nu_a> = -Gamma^p_{kl} nuM[a,p] + (hess[b,k,l] - Gamma^p df[b,p]) nuN[a,b]
    an = hessp - np.einsum("pqkl,pbq->pbkl", gammap, dfp)
    adot = (-np.einsum("pqkl,paq->pakl", gammap, nu_m)
            + np.einsum("pbkl,pab->pakl", an, nu_n))
    a2 = np.einsum("pik,plq,pakq->pail", e_hat, e_hat, adot)

    s_dom = s_of(lam)
    s_tar = s_of(lam_t)
    term = 2.0 * np.einsum("pail,pail->p",
                           (s_dom[:, None, :, None] + s_tar[:, :, None, None])
                           * a2, a2)
    return term.reshape(grid)


def torus_evolution_residual(prev: TorusFlowState, mid: TorusFlowState,
                             nxt: TorusFlowState, dt: float) -> float:
    """Max-norm defect of the scalar evolution identity at the middle time.

    (sigma_next - sigma_prev)/(2 dt) - eta^{ij} d_i d_j sigma - sum_i term_I,
    evaluated on the integrated (reparametrized) solution, where the
    reparametrizing drift combines with the rough Laplacian into the plain
    eta^{ij} second-difference form.
    """
    sig_p = _torus_sigma(prev)
    sig_n = _torus_sigma(nxt)
    sig_m = _torus_sigma(mid)
    df = _torus_df(mid)
    _, inv = _torus_eta_inv(df, mid.m)
    lap = np.zeros_like(sig_m)
    for i in range(mid.m):
        for j in range(mid.m):
            term = (_d2(sig_m, i, mid.h) if i == j
                    else _d1(_d1(sig_m, i, mid.h), j, mid.h))
            lap += inv[i, j] * term
    res = (sig_n - sig_p) / (2.0 * dt) - lap - _torus_term_one(mid)
    return float(abs(res).max())


# ---------------------------------------------------------------------------
# equivariant sphere suspension
# ---------------------------------------------------------------------------


@dataclass
class EquivariantFlowState:
    """Profile rho(theta) of an equivariant map between round spheres.

    theta is a uniform grid on [0, pi] including both poles; rho(0) = 0 and
    rho(pi) = boundary_class * pi are pinned (the run's topological class).
    """

    m: int
    n: int
    rho: np.ndarray
    boundary_class: int = 0
    t: float = 0.0

    def __post_init__(self):
        self.rho = np.asarray(self.rho, dtype=float)
        if self.m > self.n:
            raise ValueError("suspension ansatz needs m <= n")
        if self.boundary_class not in (0, 1):
            raise ValueError("boundary_class must be 0 or 1")
        if abs(self.rho[0]) > 1e-14 or abs(self.rho[-1] - self.boundary_class * math.pi) > 1e-14:
            raise ValueError("rho must satisfy the pinned pole values")

    @property
    def theta(self) -> np.ndarray:
        return np.linspace(0.0, math.pi, self.rho.size)

    @property
    def h(self) -> float:
        return math.pi / (self.rho.size - 1)


def _rho_ghosts(rho: np.ndarray, boundary_class: int) -> np.ndarray:
    """Extend rho by odd reflection at both poles (class pi: odd about pi)."""
    left = -rho[1]
    right = (2.0 * math.pi - rho[-2]) if boundary_class else -rho[-2]
    return np.concatenate([[left], rho, [right]])


def _rho_derivatives(rho: np.ndarray, boundary_class: int, h: float):
    ext = _rho_ghosts(rho, boundary_class)
    dp = (ext[2:] - ext[:-2]) / (2.0 * h)
    ddp = (ext[2:] - 2.0 * ext[1:-1] + ext[:-2]) / h**2
    return dp, ddp


def equivariant_derivatives(st: EquivariantFlowState):
    """Centered rho' and rho'' on all nodes, poles via ghost reflection."""
    return _rho_derivatives(st.rho, st.boundary_class, st.h)


def _eq_rhs(rho, dp, ddp, sin_th, sincos_th, m, r_m, r_n):
    """Interior right-hand side given precomputed theta trig (no endpoints)."""
    i = slice(1, -1)
    sr = np.sin(rho[i])
    diff = ddp[i] / (r_m**2 + r_n**2 * dp[i] ** 2)
    denom = r_m**2 * sin_th**2 + r_n**2 * sr**2
    rot = (m - 1) * (sincos_th * dp[i] - sr * np.cos(rho[i])) / denom
    return diff + rot


def equivariant_rhs(st: EquivariantFlowState, r_m: float, r_n: float) -> np.ndarray:
    """Right-hand side of the reduced flow; pinned poles contribute zero."""
    th = st.theta[1:-1]
    dp, ddp = equivariant_derivatives(st)
    rhs = np.zeros_like(st.rho)
    rhs[1:-1] = _eq_rhs(st.rho, dp, ddp, np.sin(th), np.sin(th) * np.cos(th),
                        st.m, r_m, r_n)
    return rhs


def equivariant_dt(st: EquivariantFlowState, r_m: float, r_n: float,
                   cfl: float = 0.4) -> float:
    """CFL-limited step from the diffusion and drift coefficients."""
    th = st.theta[1:-1]
    dp, _ = equivariant_derivatives(st)
    diff = 1.0 / (r_m**2 + r_n**2 * dp[1:-1] ** 2)
    denom = r_m**2 * np.sin(th) ** 2 + r_n**2 * np.sin(st.rho[1:-1]) ** 2
    drift = abs((st.m - 1) * np.sin(th) * np.cos(th) / denom)
    rate = 2.0 * diff.max() / st.h**2 + drift.max() / st.h
    return cfl / rate


def equivariant_step(st: EquivariantFlowState, dt: float, r_of_t) -> EquivariantFlowState:
    """One Heun step; ``r_of_t`` maps time to the radius pair (r_M, r_N)."""
    rm1, rn1 = r_of_t(st.t)
    k1 = equivariant_rhs(st, rm1, rn1)
    mid = EquivariantFlowState(st.m, st.n, st.rho + dt * k1, st.boundary_class,
                               st.t + dt)
    rm2, rn2 = r_of_t(st.t + dt)
    k2 = equivariant_rhs(mid, rm2, rn2)
    out = EquivariantFlowState(st.m, st.n, st.rho + 0.5 * dt * (k1 + k2),
                               st.boundary_class, st.t + dt)
    out.rho[0] = 0.0
    out.rho[-1] = st.boundary_class * math.pi
    return out


def equivariant_lambdas(st: EquivariantFlowState, r_m: float, r_n: float):
    """(lambda_radial, lambda_spherical) at every node.

    The radial stretch is (r_N/r_M)|rho'|; the m-1 spherical stretches equal
    r_N sin(rho) / (r_M sin(theta)) with the pole values filled by the limit
    rho'(pole) * cos(rho(pole)) (L'Hopital).
    """
    th = st.theta
    dp, _ = equivariant_derivatives(st)
    lam_r = (r_n / r_m) * np.abs(dp)
    lam_s = np.empty_like(lam_r)
    i = slice(1, -1)
    lam_s[i] = r_n * np.abs(np.sin(st.rho[i])) / (r_m * np.sin(th[i]))
    lam_s[0] = (r_n / r_m) * abs(dp[0] * math.cos(st.rho[0]))
    lam_s[-1] = (r_n / r_m) * abs(dp[-1] * math.cos(st.rho[-1]))
    return lam_r, lam_s


def equivariant_monitor(st: EquivariantFlowState, r_m: float, r_n: float):
    lam_r, lam_s = equivariant_lambdas(st, r_m, r_n)
    top1 = np.maximum(lam_r, lam_s)
    # second-largest singular value: the spherical one has multiplicity m-1
    top2 = lam_s if st.m >= 3 else np.minimum(lam_r, lam_s)
    m_of = float((s_of(top1) + s_of(top2)).min())
    return m_of, float(top1.max()), float((top1 * top2).max())


# ---------------------------------------------------------------------------
# run orchestration
# ---------------------------------------------------------------------------


TORUS_PRESETS = ("zero", "sine", "linear_sine")
EQUIVARIANT_PRESETS = ("zero", "sine", "identity", "identity_sine")


@dataclass
class FlowConfig:
    """Configuration of one flow experiment (deterministic; no clock state)."""

    case: str
    m: int = 2
    n: int = 2
    grid: int = 0  # 0: per-case default (torus 64 per axis, equivariant 512)
    cfl: float = 0.4
    t_end: float = 0.5
    preset: str = "sine"
    amplitude: float = 0.1
    period: float = 2.0 * math.pi
    winding: tuple = ()
    boundary_class: int = 0
    radius_m: float = 1.0
    radius_n: float = 1.0
    background_m: str = "static"
    background_n: str = "static"
    t_end_frac_of_extinction: float | None = None
    monitor_every: int = 0  # target number of monitor records (0: 120)
    seed: int = 0

    def __post_init__(self):
        if self.case not in ("torus", "equivariant"):
            raise ValueError("case must be 'torus' or 'equivariant'")
        presets = TORUS_PRESETS if self.case == "torus" else EQUIVARIANT_PRESETS
        if self.preset not in presets:
            raise ValueError(f"unknown preset {self.preset!r} for {self.case}")
        if self.grid == 0:
            self.grid = 64 if self.case == "torus" else 512

    @staticmethod
    def from_dict(d: dict) -> "FlowConfig":
        keys = {f for f in FlowConfig.__dataclass_fields__}
        unknown = set(d) - keys
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        cfg = FlowConfig(**d)
        if cfg.winding:
            cfg.winding = tuple(tuple(int(x) for x in row) for row in cfg.winding)
        return cfg

    def to_dict(self) -> dict:
        d = asdict(self)
        d["winding"] = [list(r) for r in self.winding] if self.winding else []
        return d


def _torus_initial(cfg: FlowConfig) -> TorusFlowState:
    m, n, big = cfg.m, cfg.n, cfg.grid
    x = np.arange(big) * (cfg.period / big)
    mesh = np.meshgrid(*([x] * m), indexing="ij")
    q = 2.0 * math.pi / cfg.period
    u = np.zeros((n,) + (big,) * m)
    amp = cfg.amplitude
    if cfg.preset in ("sine", "linear_sine"):
        u[0] = amp * np.sin(q * mesh[0]) * (np.cos(q * mesh[1]) if m >= 2 else 1.0)
        if n >= 2 and m >= 2:
            u[1] = amp * np.sin(q * mesh[1])
    if cfg.winding:
        lin = np.asarray(cfg.winding, dtype=float)
        if lin.shape != (n, m):
            raise ValueError("winding matrix must be n x m")
    elif cfg.preset == "linear_sine":
        lin = np.zeros((n, m))
        lin[0, 0] = 1.0  # one winding direction: area-decreasing, not distance-
    else:
        lin = np.zeros((n, m))
    return TorusFlowState(m, n, cfg.period, lin, u)


def _equivariant_initial(cfg: FlowConfig) -> EquivariantFlowState:
    th = np.linspace(0.0, math.pi, cfg.grid + 1)
    if cfg.preset == "zero":
        rho = np.zeros_like(th)
        cls = 0
    elif cfg.preset == "sine":
        rho = cfg.amplitude * np.sin(th)
        cls = 0
    elif cfg.preset == "identity":
        rho = th.copy()
        cls = 1
    else:  # identity_sine
        rho = th + cfg.amplitude * np.sin(th)
        cls = 1
    if cfg.boundary_class != cls:
        raise ValueError(f"preset {cfg.preset!r} fixes boundary_class {cls}")
    return EquivariantFlowState(cfg.m, cfg.n, rho, cls)


def _paths(cfg: FlowConfig):
    pm = BackgroundPath(ModelSpace("sphere", cfg.m, scale=cfg.radius_m),
                        "ricci" if cfg.background_m == "ricci" else "static")
    pn = BackgroundPath(ModelSpace("sphere", cfg.n, scale=cfg.radius_n),
                        "ricci" if cfg.background_n == "ricci" else "static")
    return pm, pn


def _coupling_constant(cfg: FlowConfig, t_end: float, c0: float = 8.0):
    """Explicit monotonicity rate for shrinking-background runs.

    Evaluates the curvature-bound aggregate at the worst time of the run
    (curvature 1/r^2 scaled by 1/(1-Lt), metric speed = Einstein constant of
    the evolving metric), mirroring the sweep constant convention.
    """
    pm, pn = _paths(cfg)
    if pm.mode == "static" and pn.mode == "static":
        return None
    f_m = pm.metric_factor(t_end) if pm.mode == "ricci" else 1.0
    f_n = pn.metric_factor(t_end) if pn.mode == "ricci" else 1.0
    k_m = 1.0 / (cfg.radius_m**2 * f_m)
    k_n = 1.0 / (cfg.radius_n**2 * f_n)
    dt_m = pm.einstein_rate / f_m
    dt_n = pn.einstein_rate / f_n
    return c0 * (k_m + k_n + dt_m + dt_n) * (cfg.m + cfg.n)


def run(cfg: FlowConfig) -> FlowSeries:
    """Integrate a configured flow and collect its monitor series."""
    if cfg.case == "torus":
        return _run_torus(cfg)
    return _run_equivariant(cfg)


def _run_torus(cfg: FlowConfig) -> FlowSeries:
    st = _torus_initial(cfg)
    dt = torus_cfl_dt(st, cfg.cfl)
    n_steps = max(2, int(math.ceil(cfg.t_end / dt)))
    dt = cfg.t_end / n_steps
    records = cfg.monitor_every or 120
    every = max(1, n_steps // records)

    series = FlowSeries(meta={
        "case": "torus", "dt": dt, "steps": n_steps, "h": st.h,
        "monitor_every_steps": every, "config": cfg.to_dict(), "a_used": None,
    })
    m_of, lmax, prod = torus_monitor(st)
    series.append(0.0, m_of, lmax, prod, float("nan"), 1.0, 1.0)

    # rows land on the middle of a 3-state window so the residual's centered
    # time difference matches the recorded state
    window: list[TorusFlowState] = [st]
    try:
        for k in range(1, n_steps + 1):
            st = torus_step(st, dt)
            window.append(st)
            if len(window) > 3:
                window.pop(0)
            if len(window) == 3 and ((k - 1) % every == 0 or k == n_steps):
                mid = window[1]
                m_of, lmax, prod = torus_monitor(mid)
                res = torus_evolution_residual(window[0], mid, window[2], dt)
                series.append(mid.t, m_of, lmax, prod, res, 1.0, 1.0)
                if lmax > LAMBDA_ABORT:
                    raise FlowAbort(f"lambda_max {lmax:.2f} beyond guard")
        m_of, lmax, prod = torus_monitor(st)
        series.append(st.t, m_of, lmax, prod, float("nan"), 1.0, 1.0)
    except FlowAbort as err:
        series.abort_reason = str(err)
    return series


def _run_equivariant(cfg: FlowConfig) -> FlowSeries:
    pm, pn = _paths(cfg)
    t_cap = min(pm.t_max, pn.t_max)
    t_end = cfg.t_end
    if cfg.t_end_frac_of_extinction is not None:
        if not math.isfinite(t_cap):
            raise ValueError("extinction fraction needs a shrinking background")
        t_end = cfg.t_end_frac_of_extinction * t_cap
    if t_end >= t_cap:
        raise ValueError(f"t_end {t_end} reaches background extinction {t_cap}")

    def factors(t):
        f_m = pm.metric_factor(t) if pm.mode == "ricci" else 1.0
        f_n = pn.metric_factor(t) if pn.mode == "ricci" else 1.0
        return f_m, f_n

    def radii(t):
        f_m, f_n = factors(t)
        return cfg.radius_m * math.sqrt(f_m), cfg.radius_n * math.sqrt(f_n)

    st = _equivariant_initial(cfg)
    series = FlowSeries(meta={
        "case": "equivariant", "h": st.h, "t_end": t_end,
        "config": cfg.to_dict(),
        "a_used": _coupling_constant(cfg, t_end),
    })
    r_m, r_n = radii(0.0)
    m_of, lmax, prod = equivariant_monitor(st, r_m, r_n)
    series.append(0.0, m_of, lmax, prod,
                  float(abs(equivariant_rhs(st, r_m, r_n)).max()), 1.0, 1.0)

    next_record = t_end / (cfg.monitor_every or 120)
    record_dt = next_record

    # hot loop: theta trig is grid-fixed, the CFL step is refreshed in blocks
    h = st.h
    cls, m = st.boundary_class, st.m
    th = st.theta[1:-1]
    sin_th = np.sin(th)
    sincos_th = sin_th * np.cos(th)
    rho = st.rho.copy()
    t = 0.0
    dt = 0.0
    refresh = 0
    try:
        while t < t_end - 1e-14:
            if refresh == 0:
                probe = EquivariantFlowState(m, cfg.n, rho.copy(), cls, t)
                r_m, r_n = radii(t)
                dt = equivariant_dt(probe, r_m, r_n, cfg.cfl)
                refresh = 16
            refresh -= 1
            step = min(dt, t_end - t, max(next_record - t, 1e-15))
            r_m, r_n = radii(t)
            dp, ddp = _rho_derivatives(rho, cls, h)
            k1 = _eq_rhs(rho, dp, ddp, sin_th, sincos_th, m, r_m, r_n)
            mid = rho.copy()
            mid[1:-1] += step * k1
            r_m2, r_n2 = radii(t + step)
            dp, ddp = _rho_derivatives(mid, cls, h)
            k2 = _eq_rhs(mid, dp, ddp, sin_th, sincos_th, m, r_m2, r_n2)
            rho[1:-1] += 0.5 * step * (k1 + k2)
            t += step

            if t >= next_record - 1e-14 or t >= t_end - 1e-14:
                st = EquivariantFlowState(m, cfg.n, rho.copy(), cls, t)
                r_m, r_n = radii(t)
                m_of, lmax, prod = equivariant_monitor(st, r_m, r_n)
                res = float(abs(equivariant_rhs(st, r_m, r_n)).max())
                f_m, f_n = factors(t)
                series.append(t, m_of, lmax, prod, res, f_m, f_n)
                while next_record <= t + 1e-14:
                    next_record += record_dt
                if lmax > LAMBDA_ABORT:
                    raise FlowAbort(f"lambda_max {lmax:.2f} beyond guard")
    except FlowAbort as err:
        series.abort_reason = str(err)

    if series.meta["a_used"] is not None:
        series.meta["a_min_observed"] = smallest_monotone_rate(series)
    return series


def smallest_monotone_rate(series: FlowSeries) -> float:
    """Smallest a >= 0 with a*t + log(m(t)) nondecreasing over the samples.

    Reported for shrinking-background runs next to the explicit constant
    actually used; requires a positive monitor throughout.
    """
    t = np.asarray(series.times)
    m = np.asarray(series.m_of_t)
    if (m <= 0).any():
        return float("inf")
    slopes = np.diff(np.log(m)) / np.diff(t)
    return float(max(0.0, -slopes.min()))


def exp_monitor_nondecreasing(series: FlowSeries, a: float, tol: float = 1e-6) -> bool:
    """Check that exp(a t) m(t) is nondecreasing, in log form for safety."""
    t = np.asarray(series.times)
    m = np.asarray(series.m_of_t)
    if (m <= 0).any():
        return False
    vals = a * t + np.log(m)
    return bool((np.diff(vals) >= -tol).all())
