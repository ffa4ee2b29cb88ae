"""Quadratic contraction certificates and certified coupling bounds.

A diagonal pair (P, W), P > 0, certifies the smooth part h of a node when

    (x − y)ᵀ P (h(t,x) − h(t,y)) ≤ (x − y)ᵀ W (x − y)   for all x, y, t.

The bounded parts g only enter through their norm bounds M.  From such
certificates, a graph topology, and a coupling description, the report
builders in this module compute:

- a gain threshold c̃ above which the network error contracts, and
- a residual bound ε̄ on the limsup of the stacked error norm ‖e(t)‖₂,
  where eᵢ = xᵢ − x̄ and x̄ is the node average.

Five report modes exist, keyed by the CLI selector tokens:

- ``thm1``: linear coupling, per-node certificates all negative definite
  (heterogeneous smooth parts); bounded for every gain, two candidate
  residual bounds.
- ``thm2``: linear coupling, one smooth part shared by all nodes,
  sign-indefinite W allowed on coupled components; gain threshold plus a
  residual bound minimized over a certificate family.
- ``cor1``: same as thm2 with every state component coupled.
- ``thm3``: odd componentwise nonlinear coupling, heterogeneous smooth
  parts with identity-metric certificates.
- ``thm4``: odd componentwise nonlinear coupling, shared smooth part.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import optimize

from .dynamics import AffineDecomposedField
from .graph import Laplacian, Topology, build_laplacian, lambda2
from .linalg import jacobi_eigenvalues, symmetric_part

__all__ = [
    "CertifyError",
    "QuadCertificate",
    "CouplingSpec",
    "QuadWitness",
    "QuadCheck",
    "Hypothesis",
    "BoundReport",
    "CertificateFamily",
    "PointFamily",
    "ChuaCertFamily",
    "EnsembleFamily",
    "IdentityEnsemble",
    "pws_coupling",
    "check_quad_sampled",
    "quad_linear_cert",
    "chua_quad_family",
    "certify_upsilon",
    "linear_hetero_bounds",
    "linear_common_ctilde",
    "linear_common_epsbar",
    "linear_common_bounds",
    "linear_full_coupling_bounds",
    "nonlinear_hetero_bounds",
    "nonlinear_common_bounds",
]

_MARGIN = 1e-6              # slack enforcing strict inequalities in searches
_PENALTY = 1e6              # weight per unit of constraint violation
_INFEASIBLE = 1e12          # objective plateau for infeasible points
_WITNESS_SLACK = 1e-9       # tolerance before the sampler reports a witness
_N_STARTS = 20
_SEARCH_SEED = 1729


class CertifyError(ValueError):
    """A certification precondition failed or a search found no feasible point."""


# ---------------------------------------------------------------------------
# certificate and coupling containers
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class QuadCertificate:
    """Diagonal pair (P, W) with P > 0, valid inside ``domain_radius``."""

    p: np.ndarray
    w: np.ndarray
    domain_radius: float = math.inf
    method: str = "user"

    def __post_init__(self):
        p = np.array(self.p, dtype=float)
        w = np.array(self.w, dtype=float)
        if p.ndim != 1 or p.shape != w.shape or p.size == 0:
            raise CertifyError("p and w must be matching nonempty vectors")
        if not np.all(np.isfinite(p)) or not np.all(np.isfinite(w)):
            raise CertifyError("certificate entries must be finite")
        if p.min() <= 0.0:
            raise CertifyError("P must have strictly positive diagonal entries")
        if self.domain_radius <= 0.0:
            raise CertifyError("domain_radius must be positive")
        p.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "w", w)

    @property
    def dim(self) -> int:
        return self.p.size

    @property
    def p_norm(self) -> float:
        """Spectral norm of diagonal P."""
        return float(self.p.max())

    def scaled(self, alpha: float) -> "QuadCertificate":
        """(P, W) → (αP, αW); the certified inequality is scale invariant."""
        if alpha <= 0.0:
            raise CertifyError("scale factor must be positive")
        return QuadCertificate(alpha * self.p, alpha * self.w, self.domain_radius, self.method)

    def normalized(self) -> "QuadCertificate":
        """Rescale so that ‖P‖₂ = 1."""
        return self.scaled(1.0 / self.p_norm)


@dataclass(frozen=True, eq=False)
class CouplingSpec:
    """Network coupling: diffusive linear −c(L ⊗ Γ)x, or componentwise odd η.

    ``gamma`` holds the diagonal of Γ for the linear variant (nonnegative,
    zero entries mark uncoupled components).  The nonlinear variant pairs
    the coupling function η with certified sector lower bounds ``upsilon``
    (zᵀη(z) ≥ zᵀ diag(υ) z for ‖z‖ ≤ e_max) and the validity radius
    ``e_max`` (inf for global bounds).  c = 0 encodes the uncoupled
    baseline.
    """

    variant: str
    c: float
    gamma: Optional[np.ndarray] = None
    eta: Optional[Callable] = None
    upsilon: Optional[np.ndarray] = None
    e_max: float = math.inf
    label: str = ""

    def __post_init__(self):
        if self.variant not in ("linear", "nonlinear"):
            raise CertifyError("variant must be 'linear' or 'nonlinear'")
        if not math.isfinite(self.c) or self.c < 0.0:
            raise CertifyError("coupling gain c must be finite and nonnegative")
        if self.variant == "linear":
            if self.gamma is None:
                raise CertifyError("linear coupling needs gamma")
            gamma = np.array(self.gamma, dtype=float)
            if gamma.ndim != 1 or gamma.size == 0 or gamma.min() < 0.0:
                raise CertifyError("gamma must be a nonnegative vector")
            gamma.setflags(write=False)
            object.__setattr__(self, "gamma", gamma)
        else:
            if self.eta is None:
                raise CertifyError("nonlinear coupling needs eta")
            if self.upsilon is None:
                raise CertifyError("nonlinear coupling needs certified sector bounds upsilon")
            ups = np.array(self.upsilon, dtype=float)
            if ups.ndim != 1 or ups.size == 0 or ups.min() < 0.0:
                raise CertifyError("upsilon must be a nonnegative vector")
            if not ups.max() > 0.0:
                raise CertifyError("at least one upsilon entry must be positive")
            if self.e_max <= 0.0:
                raise CertifyError("e_max must be positive")
            ups.setflags(write=False)
            object.__setattr__(self, "upsilon", ups)

    def with_gain(self, c: float) -> "CouplingSpec":
        return replace(self, c=float(c))


@dataclass(frozen=True)
class QuadWitness:
    """A sampled pair violating the certified inequality."""

    x: tuple
    y: tuple
    t: float
    lhs: float
    rhs: float


@dataclass(frozen=True)
class QuadCheck:
    holds: bool
    n_samples: int
    witness: Optional[QuadWitness] = None


@dataclass(frozen=True)
class Hypothesis:
    name: str
    passed: bool
    detail: str = ""


@dataclass(eq=False)
class BoundReport:
    """Everything a certification run concluded, machine-readable.

    ``eps1`` is the trapping-ball candidate (meaningful in thm1/thm3),
    ``eps2`` the decay-margin candidate; ``eps_bar`` is their minimum when
    both exist and is None when a hypothesis failed.
    """

    mode: str
    n_nodes: int
    dim: int
    c: Optional[float] = None
    c_tilde: Optional[float] = None
    eps1: Optional[float] = None
    eps2: Optional[float] = None
    eps_bar: Optional[float] = None
    eps_source: Optional[str] = None
    m_bar: Optional[float] = None
    h_bar0: Optional[float] = None
    w_max: Optional[float] = None
    ball_radius: Optional[float] = None
    h_max: Optional[float] = None
    h_max_method: Optional[str] = None
    w_max_diag: Optional[tuple] = None
    m_value: Optional[float] = None
    r_max: Optional[float] = None
    nu: Optional[float] = None
    delta: Optional[float] = None
    lambda2: Optional[float] = None
    lambda2_coupled: Optional[float] = None
    p_opt: Optional[tuple] = None
    w_opt: Optional[tuple] = None
    gamma: Optional[tuple] = None
    upsilon: Optional[tuple] = None
    e_max: Optional[float] = None
    hypotheses: tuple = ()
    notes: tuple = ()

    @property
    def certified(self) -> bool:
        if not all(h.passed for h in self.hypotheses):
            return False
        return self.eps_bar is not None and math.isfinite(self.eps_bar)

    def to_dict(self) -> dict:
        def plain(v):
            if isinstance(v, float) and math.isinf(v):
                return "inf" if v > 0 else "-inf"
            if isinstance(v, tuple):
                return [plain(x) for x in v]
            if isinstance(v, Hypothesis):
                return {"name": v.name, "passed": v.passed, "detail": v.detail}
            return v

        keys = [
            "mode", "n_nodes", "dim", "c", "c_tilde", "eps1", "eps2", "eps_bar",
            "eps_source", "m_bar", "h_bar0", "w_max", "ball_radius", "h_max",
            "h_max_method", "w_max_diag", "m_value", "r_max", "nu", "delta",
            "lambda2", "lambda2_coupled", "p_opt", "w_opt", "gamma", "upsilon",
            "e_max", "hypotheses", "notes",
        ]
        out = {k: plain(getattr(self, k)) for k in keys}
        out["certified"] = self.certified
        return out

    def to_text(self) -> str:
        def fmt(v):
            if v is None:
                return "n/a"
            if isinstance(v, float):
                return f"{v:.10g}"
            if isinstance(v, tuple):
                return "(" + ", ".join(fmt(x) for x in v) + ")"
            return str(v)

        lines = [
            f"mode: {self.mode}",
            f"network: {self.n_nodes} nodes of dimension {self.dim}",
            f"gain c: {fmt(self.c)}    gain threshold c_tilde: {fmt(self.c_tilde)}",
            f"residual bound eps_bar: {fmt(self.eps_bar)}"
            + (f"    (from {self.eps_source})" if self.eps_source else ""),
            f"  candidates: ball {fmt(self.eps1)}, decay {fmt(self.eps2)}",
            f"noise bound M_bar: {fmt(self.m_bar)}    h at origin: {fmt(self.h_bar0)}",
            f"lambda2: {fmt(self.lambda2)}    lambda2 on coupled components: {fmt(self.lambda2_coupled)}",
            f"decay margin m: {fmt(self.m_value)}",
        ]
        if self.ball_radius is not None:
            lines.append(f"trapping ball radius: {fmt(self.ball_radius)}")
        if self.h_max is not None:
            lines.append(f"h sup on ball: {fmt(self.h_max)} ({self.h_max_method})")
        if self.r_max is not None:
            lines.append(f"r_max: {fmt(self.r_max)} (nu {fmt(self.nu)}, delta {fmt(self.delta)})")
        if self.p_opt is not None:
            lines.append(f"P*: {fmt(self.p_opt)}")
        if self.w_opt is not None:
            lines.append(f"W*: {fmt(self.w_opt)}")
        if self.w_max_diag is not None:
            lines.append(f"componentwise max W: {fmt(self.w_max_diag)}")
        if self.gamma is not None:
            lines.append(f"gamma: {fmt(self.gamma)}")
        if self.upsilon is not None:
            lines.append(f"upsilon: {fmt(self.upsilon)}    e_max: {fmt(self.e_max)}")
        lines.append("hypotheses:")
        for hyp in self.hypotheses:
            status = "pass" if hyp.passed else "FAIL"
            detail = f" [{hyp.detail}]" if hyp.detail else ""
            lines.append(f"  - {hyp.name}: {status}{detail}")
        for note in self.notes:
            lines.append(f"note: {note}")
        lines.append(f"certified: {'yes' if self.certified else 'no'}")
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# coupling functions and elementary certificates
# ---------------------------------------------------------------------------


def pws_coupling(z):
    """Odd piecewise coupling: identity inside |z| ≤ 1, then sgn(z)((|z|−1)² + 1)."""
    z = np.asarray(z, dtype=float)
    a = np.abs(z)
    return np.where(a <= 1.0, z, np.sign(z) * ((a - 1.0) ** 2 + 1.0))


def quad_linear_cert(a_matrix, p=None) -> QuadCertificate:
    """Exact global certificate for a linear smooth part h(x) = A x.

    With diagonal positive P, (x−y)ᵀP A(x−y) ≤ λ_max(sym(PA)) ‖x−y‖², so
    W = λ_max(sym(PA))·I is tight among isotropic diagonal W.
    """
    A = np.asarray(a_matrix, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise CertifyError("a_matrix must be square")
    n = A.shape[0]
    if p is None:
        p = np.ones(n)
    else:
        p = np.asarray(p, dtype=float)
        if p.shape != (n,) or p.min() <= 0.0:
            raise CertifyError("p must be a positive vector matching a_matrix")
    lam = float(jacobi_eigenvalues(symmetric_part(p[:, None] * A))[-1])
    return QuadCertificate(p=p, w=np.full(n, lam), method="analytic-linear")


def chua_quad_family(p1: float, p3: float, rho: float,
                     alpha: float = 10.0, beta: float = 17.30,
                     slope_a: float = -1.34, slope_b: float = -0.73) -> QuadCertificate:
    """Diagonal certificate family for the double-scroll smooth part.

    P = diag(p1, β·p3, p3) cancels the cross terms between the second and
    third components; the remaining 2×2 block is dominated via a
    completed square with free parameter ρ > 0, giving

        W = diag(−α(1+s)·p1 + ρ(α·p1 + p2)/2,  (α·p1 + p2)/(2ρ) − p2,  0)

    with p2 = β·p3 and s the steeper diode sector slope.
    """
    if min(p1, p3, rho) <= 0.0:
        raise CertifyError("p1, p3, rho must be positive")
    p2 = beta * p3
    s = min(slope_a, slope_b)
    w1 = -alpha * (1.0 + s) * p1 + rho * (alpha * p1 + p2) / 2.0
    w2 = (alpha * p1 + p2) / (2.0 * rho) - p2
    return QuadCertificate(
        p=np.array([p1, p2, p3]),
        w=np.array([w1, w2, 0.0]),
        method="chua-family",
    )


# ---------------------------------------------------------------------------
# sampled certificate checking
# ---------------------------------------------------------------------------


def _uniform_ball(rng: np.random.Generator, k: int, n: int, radius: float) -> np.ndarray:
    dirs = rng.standard_normal((k, n))
    norms = np.linalg.norm(dirs, axis=1)
    norms[norms == 0.0] = 1.0
    radii = radius * rng.random(k) ** (1.0 / n)
    return dirs * (radii / norms)[:, None]


def _batch_h(h: Callable, t: float, x: np.ndarray) -> np.ndarray:
    """Evaluate h on rows of x, using broadcasting when the field supports it."""
    try:
        out = np.asarray(h(t, x), dtype=float)
        if out.shape == x.shape:
            return out
    except Exception:
        pass
    return np.stack([np.asarray(h(t, row), dtype=float) for row in x])


def check_quad_sampled(h: Callable, cert: QuadCertificate, radius: float,
                       n_samples: int = 100_000, seed: int = 0,
                       t_window: tuple = (0.0, 10.0)) -> QuadCheck:
    """Monte Carlo check of a certificate on state pairs inside a ball.

    Pairs (x, y) are drawn uniformly in the ball of the given radius; each
    block of samples shares one uniformly drawn time t.  The first pair
    whose left side exceeds the right side by more than 1e-9 is returned
    as a witness.  A passing check is evidence, not proof; analytic
    certificates should prefer exact constructions.
    """
    if radius <= 0.0:
        raise CertifyError("radius must be positive")
    if radius > cert.domain_radius:
        raise CertifyError("check radius exceeds the certificate's validity domain")
    if n_samples < 1:
        raise CertifyError("n_samples must be positive")
    rng = np.random.default_rng(seed)
    p, w = cert.p, cert.w
    n = cert.dim
    checked = 0
    block = 65536
    while checked < n_samples:
        k = min(block, n_samples - checked)
        t = float(rng.uniform(t_window[0], t_window[1]))
        x = _uniform_ball(rng, k, n, radius)
        y = _uniform_ball(rng, k, n, radius)
        d = x - y
        dh = _batch_h(h, t, x) - _batch_h(h, t, y)
        lhs = np.einsum("ij,j,ij->i", d, p, dh)
        rhs = np.einsum("ij,j,ij->i", d, w, d)
        bad = lhs > rhs + _WITNESS_SLACK
        if bad.any():
            i = int(np.argmax(bad))
            witness = QuadWitness(
                x=tuple(float(v) for v in x[i]),
                y=tuple(float(v) for v in y[i]),
                t=t,
                lhs=float(lhs[i]),
                rhs=float(rhs[i]),
            )
            return QuadCheck(holds=False, n_samples=checked + i + 1, witness=witness)
        checked += k
    return QuadCheck(holds=True, n_samples=checked)


# ---------------------------------------------------------------------------
# sector certification for nonlinear couplings
# ---------------------------------------------------------------------------


def _trisect_min(fn: Callable, lo: float, hi: float, iters: int = 120) -> float:
    """Minimum value of a locally unimodal scalar function on [lo, hi]."""
    for _ in range(iters):
        third = (hi - lo) / 3.0
        m1, m2 = lo + third, hi - third
        if fn(m1) <= fn(m2):
            hi = m2
        else:
            lo = m1
    return float(fn(0.5 * (lo + hi)))


def certify_upsilon(eta: Callable, e_max: float, grid_points: int = 4096,
                    dim: int = 1, probe_radius: float = 100.0) -> np.ndarray:
    """Componentwise sector lower bounds for an odd coupling function.

    Returns, per component i, the largest υᵢ ≥ 0 found such that
    z·ηᵢ(z·eᵢ) ≥ υᵢ·z² for 0 < |z| ≤ e_max; a grid scan refined by
    bracketed trisection around the grid minimum.  Infinite e_max is
    probed on ``probe_radius`` (callers should surface that the bound was
    certified on a finite probe).  Raises when η fails the oddness spot
    check or no component has a positive bound.
    """
    if e_max <= 0.0:
        raise CertifyError("e_max must be positive")
    if grid_points < 8:
        raise CertifyError("grid_points must be at least 8")
    radius = e_max if math.isfinite(e_max) else float(probe_radius)
    zs = np.linspace(radius / grid_points, radius, grid_points)
    out = np.empty(dim)
    for i in range(dim):
        def ratio(z, i=i):
            z = np.asarray(z, dtype=float)
            full = np.zeros(z.shape + (dim,))
            full[..., i] = z
            val = np.asarray(eta(full), dtype=float)[..., i]
            return val / z

        # oddness spot check on this axis
        probes = np.array([radius * f for f in (0.17, 0.43, 0.71, 0.98)])
        plus = ratio(probes) * probes
        minus = ratio(-probes) * (-probes)
        if np.max(np.abs(plus + minus)) > 1e-9 * max(1.0, np.max(np.abs(plus))):
            raise CertifyError("coupling function must be componentwise odd")

        vals = ratio(zs)
        k = int(np.argmin(vals))
        lo = zs[max(k - 1, 0)]
        hi = zs[min(k + 1, grid_points - 1)]
        refined = _trisect_min(lambda z: float(ratio(np.array([z]))[0]), float(lo), float(hi))
        out[i] = max(min(float(vals[k]), refined), 0.0)
    if out.max() <= 0.0:
        raise CertifyError("coupling has no positive sector bound on any component")
    return out


# ---------------------------------------------------------------------------
# certificate families and the multi-start search
# ---------------------------------------------------------------------------


class CertificateFamily:
    """A search space of certificates, parameterized in log space.

    Subclasses map a parameter vector theta ∈ ℝ^n_params to a certificate;
    positive quantities are exp(theta) components so that searches stay in
    the feasible cone.  ``violations`` returns the total positive amount
    by which family-specific constraints fail (zero when satisfied).
    """

    n_params: int = 0

    def cert(self, theta) -> QuadCertificate:
        raise NotImplementedError

    def violations(self, theta) -> float:
        return 0.0

    def start_points(self, rng: np.random.Generator, k: int) -> np.ndarray:
        if self.n_params == 0:
            return np.zeros((1, 0))
        return rng.uniform(-2.3, 2.3, size=(k, self.n_params))


class PointFamily(CertificateFamily):
    """The degenerate family holding a single fixed certificate."""

    n_params = 0

    def __init__(self, cert: QuadCertificate):
        self._cert = cert

    def cert(self, theta) -> QuadCertificate:
        return self._cert


class ChuaCertFamily(CertificateFamily):
    """Three-parameter family (p1, p3, ρ) for the double-scroll smooth part."""

    n_params = 3

    def __init__(self, alpha: float = 10.0, beta: float = 17.30,
                 slope_a: float = -1.34, slope_b: float = -0.73):
        self.alpha = alpha
        self.beta = beta
        self.slope_a = slope_a
        self.slope_b = slope_b

    def cert(self, theta) -> QuadCertificate:
        p1, p3, rho = np.exp(np.asarray(theta, dtype=float))
        return chua_quad_family(p1, p3, rho, self.alpha, self.beta, self.slope_a, self.slope_b)


class EnsembleFamily:
    """Search space of per-node certificates sharing one diagonal metric P.

    ``ensemble(theta)`` returns (p, w_rows): the shared diagonal of P with
    shape (dim,), and per-node diagonal W entries with shape (n_nodes, dim).
    """

    n_params: int = 0

    def ensemble(self, theta):
        raise NotImplementedError

    def violations(self, theta) -> float:
        return 0.0

    def start_points(self, rng: np.random.Generator, k: int) -> np.ndarray:
        if self.n_params == 0:
            return np.zeros((1, 0))
        return rng.uniform(-2.3, 2.3, size=(k, self.n_params))


class IdentityEnsemble(EnsembleFamily):
    """P = I with each node's declared identity-metric certificate."""

    n_params = 0

    def __init__(self, fields: Sequence[AffineDecomposedField]):
        rows = []
        for f in fields:
            if f.w_identity is None:
                raise CertifyError(
                    f"node '{f.label or '?'}' carries no identity-metric certificate"
                )
            rows.append(f.w_identity)
        self._dim = fields[0].dim
        self._rows = np.array(rows, dtype=float)

    def ensemble(self, theta):
        return np.ones(self._dim), self._rows


def _multistart_minimize(objective: Callable, family, extra_starts=(),
                         n_starts: int = _N_STARTS, seed: int = _SEARCH_SEED):
    """Deterministic multi-start Nelder-Mead; winner by (value, start index)."""
    rng = np.random.default_rng(seed)
    starts = list(family.start_points(rng, n_starts))
    starts.extend(np.asarray(s, dtype=float) for s in extra_starts)
    best_val = math.inf
    best_theta = starts[0]
    for theta0 in starts:
        if theta0.size == 0:
            val = float(objective(theta0))
            cand_theta = theta0
        else:
            res = optimize.minimize(
                objective, theta0, method="Nelder-Mead",
                options={"xatol": 1e-10, "fatol": 1e-13, "maxiter": 2000, "maxfev": 4000},
            )
            val = float(res.fun)
            cand_theta = np.asarray(res.x, dtype=float)
        if val < best_val:
            best_val = val
            best_theta = cand_theta
    return best_theta, best_val


def _guarded(objective: Callable) -> Callable:
    """Map construction failures inside a search to a large finite value."""

    def wrapped(theta):
        try:
            return objective(theta)
        except (CertifyError, FloatingPointError, OverflowError):
            return 1e18

    return wrapped


# ---------------------------------------------------------------------------
# shared report arithmetic
# ---------------------------------------------------------------------------


def _decay_margin(c: float, lam2_graph: float, pg: np.ndarray,
                  w_diag: np.ndarray, active: np.ndarray) -> float:
    """m = −max(coupled growth − c·λ₂·min coupled metric, uncoupled growth)."""
    terms = []
    if active.any():
        terms.append(float(w_diag[active].max()) - c * lam2_graph * float(pg[active].min()))
    if (~active).any():
        terms.append(float(w_diag[~active].max()))
    return -max(terms)


def _h_sup_on_ball(fields: Sequence[AffineDecomposedField], radius: float,
                   n_samples: int = 100_000, seed: int = 97):
    """sup over nodes and the origin ball of ‖h(t, x)‖₂, with method tag.

    Fields annotated with a slope bound are evaluated exactly as
    h_gain·radius + h0_norm; others are sampled on the ball across a few
    times, and the result is flagged statistical.
    """
    if radius < 0.0:
        raise CertifyError("radius must be nonnegative")
    rng = np.random.default_rng(seed)
    best = 0.0
    method = "analytic"
    for f in fields:
        if f.h_gain is not None:
            val = f.h_gain * radius + f.h0_norm
        else:
            method = "sampled"
            val = 0.0
            times = rng.uniform(0.0, 10.0, 8)
            per_time = max(n_samples // len(times), 1)
            for t in times:
                pts = _uniform_ball(rng, per_time, f.dim, radius)
                hv = _batch_h(f.h, float(t), pts)
                val = max(val, float(np.linalg.norm(hv, axis=1).max()))
        best = max(best, val)
    return best, method


def _require_common_h(fields: Sequence[AffineDecomposedField], seed: int = 11):
    """All nodes must share one smooth part: identical callable or sampled equality."""
    f0 = fields[0]
    if all(f.h is f0.h for f in fields):
        return
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(64, f0.dim))
    times = rng.uniform(0.0, 10.0, 4)
    for f in fields[1:]:
        if f.dim != f0.dim:
            raise CertifyError("all nodes must share one state dimension")
        for t in times:
            a = _batch_h(f0.h, float(t), x)
            b = _batch_h(f.h, float(t), x)
            scale = max(1.0, float(np.abs(a).max()))
            if float(np.abs(a - b).max()) > 1e-9 * scale:
                raise CertifyError(
                    "this mode requires all nodes to share one smooth part; "
                    f"node '{f.label or '?'}' differs from node '{f0.label or '?'}'"
                )


def _stack_mismatch_bounds(fields: Sequence[AffineDecomposedField]):
    m_bar = max(f.M for f in fields)
    h_bar0 = max(f.h0_norm for f in fields)
    return m_bar, h_bar0


def _validate_network(fields, topo: Topology):
    if len(fields) != topo.n_nodes:
        raise CertifyError(
            f"{len(fields)} node fields for a {topo.n_nodes}-node topology"
        )
    dim = fields[0].dim
    if any(f.dim != dim for f in fields):
        raise CertifyError("all nodes must share one state dimension")
    return dim


def _center_stack(x_stack: np.ndarray, n_nodes: int, dim: int) -> np.ndarray:
    blocks = np.asarray(x_stack, dtype=float).reshape(n_nodes, dim)
    return (blocks - blocks.mean(axis=0)).reshape(-1)


# ---------------------------------------------------------------------------
# linear coupling, heterogeneous smooth parts (mode thm1)
# ---------------------------------------------------------------------------


def linear_hetero_bounds(fields: Sequence[AffineDecomposedField], topo: Topology,
                         gamma, c: float, q_family: Optional[EnsembleFamily] = None,
                         p_family: Optional[EnsembleFamily] = None) -> BoundReport:
    """Residual bound for linearly coupled nodes that each contract.

    Requires every node to admit a negative-definite certificate under a
    shared diagonal metric; boundedness then holds for every gain c ≥ 0,
    so the report carries no gain threshold.  Two candidate bounds are
    computed: the trapping-ball diameter (gain independent) and the
    decay-margin bound (shrinking with c); ε̄ is their minimum.
    """
    dim = _validate_network(fields, topo)
    gamma = np.asarray(gamma, dtype=float)
    if gamma.shape != (dim,) or gamma.min() < 0.0:
        raise CertifyError("gamma must be a nonnegative vector of the node dimension")
    if c < 0.0:
        raise CertifyError("gain c must be nonnegative")
    n_nodes = topo.n_nodes
    sqrt_n = math.sqrt(n_nodes)
    m_bar, h_bar0 = _stack_mismatch_bounds(fields)
    if q_family is None:
        q_family = IdentityEnsemble(fields)
    if p_family is None:
        p_family = q_family
    active = gamma > 0.0

    def normalized(family, theta):
        q, w_rows = family.ensemble(theta)
        q = np.asarray(q, dtype=float)
        w_rows = np.asarray(w_rows, dtype=float)
        scale = 1.0 / q.max()
        return q * scale, w_rows * scale

    def ball_objective(theta):
        q, w_rows = normalized(q_family, theta)
        pen = _PENALTY * q_family.violations(theta)
        w_top = float(w_rows.max())
        if w_top >= -_MARGIN:
            return _INFEASIBLE + _PENALTY * (w_top + _MARGIN) + pen
        return sqrt_n * (m_bar + h_bar0) / (-w_top) + pen

    theta_q, _ = _multistart_minimize(_guarded(ball_objective), q_family)
    q_opt, wq_rows = normalized(q_family, theta_q)
    w_top = float(wq_rows.max())
    if w_top >= 0.0:
        raise CertifyError(
            "every node needs a negative-definite certificate for this mode "
            f"(best achieved max W entry: {w_top:.6g})"
        )
    radius = sqrt_n * (m_bar + h_bar0) / (-w_top)
    eps1 = 2.0 * radius

    h_max, h_method = _h_sup_on_ball(fields, radius)

    need_lam2 = bool(active.any()) and c > 0.0
    lam2_graph = lambda2(build_laplacian(topo)) if need_lam2 else 0.0

    def decay_objective(theta):
        p, w_rows = normalized(p_family, theta)
        pen = _PENALTY * p_family.violations(theta)
        w_diag = w_rows.max(axis=0)
        m = _decay_margin(c, lam2_graph, p * gamma, w_diag, active)
        if m <= _MARGIN:
            return _INFEASIBLE + (_MARGIN - m) + pen
        return sqrt_n * (m_bar + h_max) / m + pen

    extra = [theta_q] if p_family is q_family else []
    theta_p, eps2_val = _multistart_minimize(_guarded(decay_objective), p_family, extra_starts=extra)
    p_opt, wp_rows = normalized(p_family, theta_p)
    w_diag = wp_rows.max(axis=0)
    m_value = _decay_margin(c, lam2_graph, p_opt * gamma, w_diag, active)
    eps2 = sqrt_n * (m_bar + h_max) / m_value if m_value > 0.0 else math.inf

    if eps1 <= eps2:
        eps_bar, source = eps1, "ball"
    else:
        eps_bar, source = eps2, "decay"

    hyps = (
        Hypothesis(
            "negative-definite certificates",
            True,
            f"max W entry {w_top:.6g} < 0 across nodes",
        ),
    )
    return BoundReport(
        mode="thm1",
        n_nodes=n_nodes,
        dim=dim,
        c=c,
        c_tilde=0.0,
        eps1=eps1,
        eps2=eps2,
        eps_bar=eps_bar,
        eps_source=source,
        m_bar=m_bar,
        h_bar0=h_bar0,
        w_max=w_top,
        ball_radius=radius,
        h_max=h_max,
        h_max_method=h_method,
        w_max_diag=tuple(float(v) for v in w_diag),
        m_value=m_value,
        lambda2=lam2_graph if need_lam2 else None,
        lambda2_coupled=(lam2_graph * float((p_opt * gamma)[active].min()))
        if need_lam2 else None,
        p_opt=tuple(float(v) for v in p_opt),
        gamma=tuple(float(v) for v in gamma),
        hypotheses=hyps,
    )


# ---------------------------------------------------------------------------
# linear coupling, shared smooth part (modes thm2 / cor1)
# ---------------------------------------------------------------------------


def _check_l(active: np.ndarray, l: Optional[int]):
    if l is not None and l != int(active.sum()):
        raise CertifyError(
            f"l = {l} disagrees with the {int(active.sum())} coupled components of gamma"
        )


def _ctilde_core(family: CertificateFamily, lam2_graph: float, gamma: np.ndarray,
                 active: np.ndarray):
    def objective(theta):
        cert = family.cert(theta).normalized()
        pen = _PENALTY * family.violations(theta)
        w, pg = cert.w, cert.p * gamma
        if (~active).any():
            worst = float(w[~active].max())
            if worst >= -_MARGIN:
                pen += _PENALTY * (worst + _MARGIN)
        if not active.any():
            return pen
        return max(float(w[active].max()) / (lam2_graph * float(pg[active].min())), 0.0) + pen

    theta, _ = _multistart_minimize(_guarded(objective), family)
    cert = family.cert(theta).normalized()
    if family.violations(theta) > 0.0:
        raise CertifyError("no certificate satisfying the family constraints was found")
    if (~active).any() and float(cert.w[~active].max()) >= 0.0:
        raise CertifyError(
            "no certificate found with negative W entries on the uncoupled components "
            f"(best: {float(cert.w[~active].max()):.6g})"
        )
    if active.any():
        c_tilde = max(
            float(cert.w[active].max())
            / (lam2_graph * float((cert.p * gamma)[active].min())),
            0.0,
        )
    else:
        c_tilde = 0.0
    return theta, c_tilde, cert


def linear_common_ctilde(family: CertificateFamily, topo: Topology, gamma,
                         l: Optional[int] = None):
    """Gain threshold for linear coupling of a shared smooth part.

    Minimizes max(λ_max(W on coupled)/λ₂(L)·min coupled p·γ, 0) over the
    certificate family; returns (c_tilde, winning normalized certificate).
    Uncoupled components must admit negative W entries.
    """
    gamma = np.asarray(gamma, dtype=float)
    if gamma.ndim != 1 or gamma.min() < 0.0:
        raise CertifyError("gamma must be a nonnegative vector")
    active = gamma > 0.0
    _check_l(active, l)
    lam2_graph = lambda2(build_laplacian(topo)) if active.any() else 0.0
    _, c_tilde, cert = _ctilde_core(family, lam2_graph, gamma, active)
    return c_tilde, cert


def linear_common_epsbar(cert: QuadCertificate, topo: Topology, gamma,
                         l: Optional[int], c: float, m_bar: float) -> float:
    """Residual bound for one fixed certificate at gain c.

    ε̄ = M̄·√N·‖P‖₂ / m with m the decay margin; raises when the margin is
    not positive at this gain (the gain is below this certificate's
    threshold, or an uncoupled component fails to contract).
    """
    gamma = np.asarray(gamma, dtype=float)
    if gamma.shape != (cert.dim,) or gamma.min() < 0.0:
        raise CertifyError("gamma must be a nonnegative vector of the certificate dimension")
    active = gamma > 0.0
    _check_l(active, l)
    lam2_graph = lambda2(build_laplacian(topo)) if (active.any() and c > 0.0) else 0.0
    m = _decay_margin(c, lam2_graph, cert.p * gamma, cert.w, active)
    if m <= 0.0:
        parts = []
        if active.any():
            coupled = float(cert.w[active].max()) - c * lam2_graph * float((cert.p * gamma)[active].min())
            if coupled >= 0.0:
                parts.append(
                    f"coupled components do not contract at c = {c:g} "
                    f"(need c·λ₂·min(p·γ) > {float(cert.w[active].max()):.6g})"
                )
        if (~active).any() and float(cert.w[~active].max()) >= 0.0:
            parts.append("an uncoupled component has a nonnegative W entry")
        raise CertifyError("decay margin is not positive: " + "; ".join(parts or ["m <= 0"]))
    return float(m_bar) * math.sqrt(topo.n_nodes) * cert.p_norm / m


def _linear_common_report(m_bar: float, topo: Topology, gamma: np.ndarray, c: float,
                          family: CertificateFamily, l: Optional[int], mode: str,
                          dim: int, h_bar0: Optional[float] = None) -> BoundReport:
    active = gamma > 0.0
    _check_l(active, l)
    if c < 0.0:
        raise CertifyError("gain c must be nonnegative")
    lam2_graph = lambda2(build_laplacian(topo)) if active.any() else 0.0
    theta0, c_tilde, cert0 = _ctilde_core(family, lam2_graph, gamma, active)
    n_nodes = topo.n_nodes
    sqrt_n = math.sqrt(n_nodes)

    gain_ok = c > c_tilde
    hyps = [
        Hypothesis(
            "gain exceeds threshold",
            gain_ok,
            f"c = {c:g} vs c_tilde = {c_tilde:.10g}",
        )
    ]

    eps_bar = None
    m_value = None
    cert_best = cert0
    if gain_ok:
        def eps_objective(theta):
            cert = family.cert(theta).normalized()
            pen = _PENALTY * family.violations(theta)
            m = _decay_margin(c, lam2_graph, cert.p * gamma, cert.w, active)
            if m <= _MARGIN:
                return _INFEASIBLE + (_MARGIN - m) + pen
            return m_bar * sqrt_n * cert.p_norm / m + pen

        theta_e, val = _multistart_minimize(
            _guarded(eps_objective), family, extra_starts=[theta0]
        )
        cert_best = family.cert(theta_e).normalized()
        m_value = _decay_margin(c, lam2_graph, cert_best.p * gamma, cert_best.w, active)
        if m_value > 0.0:
            eps_bar = m_bar * sqrt_n * cert_best.p_norm / m_value
        else:
            hyps.append(
                Hypothesis(
                    "positive decay margin",
                    False,
                    "no family member has a positive margin at this gain",
                )
            )

    pg = cert_best.p * gamma
    return BoundReport(
        mode=mode,
        n_nodes=n_nodes,
        dim=dim,
        c=c,
        c_tilde=c_tilde,
        eps1=None,
        eps2=eps_bar,
        eps_bar=eps_bar,
        eps_source="decay" if eps_bar is not None else None,
        m_bar=m_bar,
        h_bar0=h_bar0,
        m_value=m_value,
        lambda2=lam2_graph if active.any() else None,
        lambda2_coupled=(lam2_graph * float(pg[active].min())) if active.any() else None,
        p_opt=tuple(float(v) for v in cert_best.p),
        w_opt=tuple(float(v) for v in cert_best.w),
        gamma=tuple(float(v) for v in gamma),
        hypotheses=tuple(hyps),
    )


def linear_common_bounds(fields: Sequence[AffineDecomposedField], topo: Topology,
                         gamma, c: float, family: CertificateFamily,
                         l: Optional[int] = None, mode: str = "thm2") -> BoundReport:
    """Gain threshold and residual bound when all nodes share one smooth part.

    The shared-h requirement is verified (structurally or by sampling);
    M̄ is the largest per-node bound on the non-shared parts.  ε̄ is
    minimized over the certificate family at the requested gain.
    """
    dim = _validate_network(fields, topo)
    _require_common_h(fields)
    gamma = np.asarray(gamma, dtype=float)
    if gamma.shape != (dim,) or gamma.min() < 0.0:
        raise CertifyError("gamma must be a nonnegative vector of the node dimension")
    if mode == "cor1" and not (gamma > 0.0).all():
        raise CertifyError("full-coupling mode requires every gamma entry positive")
    m_bar, h_bar0 = _stack_mismatch_bounds(fields)
    return _linear_common_report(m_bar, topo, gamma, c, family, l, mode, dim, h_bar0)


def linear_full_coupling_bounds(family: CertificateFamily, topo: Topology, gamma,
                                c: float, m_bar: float) -> BoundReport:
    """Shared-smooth-part bounds when every component is coupled (γ > 0).

    Field-free variant of :func:`linear_common_bounds`; the caller vouches
    that all nodes share one smooth part with mismatch bound ``m_bar``.
    """
    gamma = np.asarray(gamma, dtype=float)
    if gamma.ndim != 1 or gamma.size == 0:
        raise CertifyError("gamma must be a nonempty vector")
    if gamma.min() <= 0.0:
        raise CertifyError("full-coupling mode requires every gamma entry positive")
    if m_bar < 0.0:
        raise CertifyError("m_bar must be nonnegative")
    return _linear_common_report(
        float(m_bar), topo, gamma, c, family, l=gamma.size, mode="cor1", dim=gamma.size
    )


# ---------------------------------------------------------------------------
# nonlinear coupling (modes thm3 / thm4)
# ---------------------------------------------------------------------------


def _nonlinear_common_pieces(coupling: CouplingSpec, topo: Topology):
    if coupling.variant != "nonlinear":
        raise CertifyError("this mode needs a nonlinear coupling spec")
    ups = coupling.upsilon
    active = ups > 0.0
    lam2_graph = lambda2(build_laplacian(topo))
    lam2_coupled = lam2_graph * float(ups[active].min())
    return ups, active, lam2_graph, lam2_coupled


def nonlinear_hetero_bounds(fields: Sequence[AffineDecomposedField], topo: Topology,
                            coupling: CouplingSpec, x0, c: Optional[float] = None,
                            delta: float = 1e-6) -> BoundReport:
    """Gain threshold and residual bound for odd componentwise coupling of
    heterogeneous nodes whose smooth parts contract in the identity metric.

    The sector bounds υ are only valid on ‖z‖ ≤ e_max, so two state-dependent
    hypotheses are checked: the initial error must fit in half the sector
    radius, and trajectories confined to the trapping ball must keep
    uncoupled components small enough.  r_max (the ball radius used for
    the h supremum) is the larger of the gain-free residual bound and
    ‖x(0)‖, inflated by delta.
    """
    dim = _validate_network(fields, topo)
    if delta <= 0.0:
        raise CertifyError("delta must be positive")
    c = float(coupling.c if c is None else c)
    if c < 0.0:
        raise CertifyError("gain c must be nonnegative")
    ups, active, lam2_graph, lam2_coupled = _nonlinear_common_pieces(coupling, topo)
    if ups.shape != (dim,):
        raise CertifyError("upsilon must have one entry per state component")
    x0 = np.asarray(x0, dtype=float).reshape(-1)
    n_nodes = topo.n_nodes
    if x0.shape != (n_nodes * dim,):
        raise CertifyError(f"x0 must have shape ({n_nodes * dim},)")
    sqrt_n = math.sqrt(n_nodes)
    m_bar, h_bar0 = _stack_mismatch_bounds(fields)

    rows = IdentityEnsemble(fields)._rows
    w_top = float(rows.max())
    if w_top >= 0.0:
        raise CertifyError(
            "every node needs a negative-definite identity-metric certificate "
            f"(max W entry: {w_top:.6g})"
        )
    eps1 = sqrt_n * (m_bar + h_bar0) / (-w_top)
    nu = float(np.linalg.norm(x0))
    r_max = max(eps1, nu) + delta
    h_max, h_method = _h_sup_on_ball(fields, r_max)
    w_diag = rows.max(axis=0)
    e_max = coupling.e_max

    e0_norm = float(np.linalg.norm(_center_stack(x0, n_nodes, dim)))
    hyp_init = Hypothesis(
        "initial error within half the sector radius",
        e0_norm <= e_max / 2.0,
        f"‖e(0)‖ = {e0_norm:.6g} vs e_max/2 = {e_max / 2.0:.6g}",
    )
    if active.all() or math.isinf(e_max):
        hyp_unc = Hypothesis(
            "uncoupled components stay within half the sector radius",
            True,
            "vacuous: all components coupled" if active.all() else "vacuous: global sector bound",
        )
    else:
        w_unc = float(w_diag[~active].max())
        ok = w_unc < 0.0 and (-sqrt_n * (m_bar + h_max) / w_unc) < e_max / 2.0
        hyp_unc = Hypothesis(
            "uncoupled components stay within half the sector radius",
            ok,
            f"residual {(-sqrt_n * (m_bar + h_max) / w_unc) if w_unc < 0 else math.inf:.6g} "
            f"vs e_max/2 = {e_max / 2.0:.6g}",
        )

    gain_term = (2.0 * sqrt_n * (m_bar + h_max) / e_max) if math.isfinite(e_max) else 0.0
    c_tilde = max((gain_term + float(w_diag[active].max())) / lam2_coupled, 0.0)
    hyp_gain = Hypothesis(
        "gain exceeds threshold", c > c_tilde, f"c = {c:g} vs c_tilde = {c_tilde:.10g}"
    )

    hyps = (hyp_init, hyp_unc, hyp_gain)
    eps2 = None
    eps_bar = None
    source = None
    m_value = None
    if all(h.passed for h in hyps):
        m_value = _decay_margin(c, lam2_graph, ups, w_diag, active)
        eps2 = sqrt_n * (m_bar + h_max) / m_value if m_value > 0.0 else math.inf
        if eps1 <= eps2:
            eps_bar, source = eps1, "ball"
        else:
            eps_bar, source = eps2, "decay"

    return BoundReport(
        mode="thm3",
        n_nodes=n_nodes,
        dim=dim,
        c=c,
        c_tilde=c_tilde,
        eps1=eps1,
        eps2=eps2,
        eps_bar=eps_bar,
        eps_source=source,
        m_bar=m_bar,
        h_bar0=h_bar0,
        w_max=w_top,
        ball_radius=eps1,
        h_max=h_max,
        h_max_method=h_method,
        w_max_diag=tuple(float(v) for v in w_diag),
        m_value=m_value,
        r_max=r_max,
        nu=nu,
        delta=delta,
        lambda2=lam2_graph,
        lambda2_coupled=lam2_coupled,
        upsilon=tuple(float(v) for v in ups),
        e_max=e_max,
        hypotheses=hyps,
    )


def nonlinear_common_bounds(fields: Sequence[AffineDecomposedField], topo: Topology,
                            coupling: CouplingSpec, e0, c: Optional[float] = None) -> BoundReport:
    """Gain threshold and residual bound for odd componentwise coupling of a
    shared smooth part with a sign-indefinite identity-metric certificate.

    Components whose W entry is nonnegative must carry a positive sector
    bound.  Takes the initial error stack e0 directly (the shared smooth
    part needs no trapping-ball construction, so no full state is needed).
    """
    dim = _validate_network(fields, topo)
    _require_common_h(fields)
    c = float(coupling.c if c is None else c)
    if c < 0.0:
        raise CertifyError("gain c must be nonnegative")
    ups, active, lam2_graph, lam2_coupled = _nonlinear_common_pieces(coupling, topo)
    if ups.shape != (dim,):
        raise CertifyError("upsilon must have one entry per state component")
    n_nodes = topo.n_nodes
    sqrt_n = math.sqrt(n_nodes)
    m_bar = max(f.M for f in fields)

    rows = IdentityEnsemble(fields)._rows
    w_diag = rows.max(axis=0)
    if ((w_diag >= 0.0) & ~active).any():
        raise CertifyError(
            "components with nonnegative W entries must carry positive sector bounds"
        )

    e0 = np.asarray(e0, dtype=float).reshape(-1)
    if e0.shape != (n_nodes * dim,):
        raise CertifyError(f"e0 must have shape ({n_nodes * dim},)")
    e0_norm = float(np.linalg.norm(e0))
    e_max = coupling.e_max
    hyp_init = Hypothesis(
        "initial error within half the sector radius",
        e0_norm <= e_max / 2.0,
        f"‖e(0)‖ = {e0_norm:.6g} vs e_max/2 = {e_max / 2.0:.6g}",
    )
    if active.all() or math.isinf(e_max):
        hyp_unc = Hypothesis(
            "uncoupled components stay within half the sector radius",
            True,
            "vacuous: all components coupled" if active.all() else "vacuous: global sector bound",
        )
    else:
        w_unc = float(w_diag[~active].max())
        ok = w_unc < 0.0 and (-sqrt_n * m_bar / w_unc) <= e_max / 2.0
        hyp_unc = Hypothesis(
            "uncoupled components stay within half the sector radius",
            ok,
            f"residual {(-sqrt_n * m_bar / w_unc) if w_unc < 0 else math.inf:.6g} "
            f"vs e_max/2 = {e_max / 2.0:.6g}",
        )

    gain_term = (2.0 * sqrt_n * m_bar / e_max) if math.isfinite(e_max) else 0.0
    c_tilde = max((gain_term + float(w_diag[active].max())) / lam2_coupled, 0.0)
    hyp_gain = Hypothesis(
        "gain exceeds threshold", c > c_tilde, f"c = {c:g} vs c_tilde = {c_tilde:.10g}"
    )

    hyps = (hyp_init, hyp_unc, hyp_gain)
    eps_bar = None
    m_value = None
    if all(h.passed for h in hyps):
        m_value = _decay_margin(c, lam2_graph, ups, w_diag, active)
        if m_value > 0.0:
            eps_bar = m_bar * sqrt_n / m_value

    return BoundReport(
        mode="thm4",
        n_nodes=n_nodes,
        dim=dim,
        c=c,
        c_tilde=c_tilde,
        eps1=None,
        eps2=eps_bar,
        eps_bar=eps_bar,
        eps_source="decay" if eps_bar is not None else None,
        m_bar=m_bar,
        w_max_diag=tuple(float(v) for v in w_diag),
        m_value=m_value,
        lambda2=lam2_graph,
        lambda2_coupled=lam2_coupled,
        upsilon=tuple(float(v) for v in ups),
        e_max=e_max,
        hypotheses=hyps,
    )
