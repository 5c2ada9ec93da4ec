"""Log-space envelope algebra for the kernel-derivative bounds.

Covers the sharp two-sided envelope and its polynomial-Gaussian relaxation,
on-diagonal derivative bounds built from iterated integrals, the mean-value
propagation step that trades two derivative orders for one, the resulting
two-index rate recurrence with its closed-form limit, the main decay right-
hand sides, the curvature-based gradient inequality gap, and fitted-constant
grid protocols.

Every envelope evaluates in log space; linear wrappers exponentiate at the
end so extreme Gaussian regimes never underflow mid-computation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

from . import oracle
from .rootspace import SpaceModel

class ShapeMismatchError(RuntimeError):
    """Oracle exceeds the bound by more than e^700: wrong envelope shape."""


@dataclass(frozen=True)
class EnvelopeBound:
    """Parameters of c * t^-alpha (1+t)^beta (1+|H|)^gamma
    * exp(-D t - B <rho,H> - C |H|^2/(4t))."""

    alpha: float
    beta: float
    gamma_exp: float
    D: float
    B: float
    C: float
    c: float = 1.0

    def __post_init__(self):
        if self.c <= 0.0:
            raise ValueError("constant slot must be positive")

    def log_eval(self, t, rho_h, h_norm):
        t = np.asarray(t, dtype=float)
        rho_h = np.asarray(rho_h, dtype=float)
        h_norm = np.asarray(h_norm, dtype=float)
        return (
            math.log(self.c)
            - self.alpha * np.log(t)
            + self.beta * np.log1p(t)
            + self.gamma_exp * np.log1p(h_norm)
            - self.D * t
            - self.B * rho_h
            - self.C * h_norm * h_norm / (4.0 * t)
        )

    def eval(self, t, rho_h, h_norm):
        return np.exp(self.log_eval(t, rho_h, h_norm))


@dataclass(frozen=True)
class BoundGrid:
    """Doubly-indexed rate grids: rows are propagation steps, columns are
    derivative orders; entries are the linear and Gaussian decay weights."""

    epsilon: float
    lambda_eps: float
    beta: np.ndarray   # shape (l_max+1, i_max+1)
    gamma: np.ndarray


def lambda_from_epsilon(epsilon: float) -> float:
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    return (1.0 - epsilon) / (1.0 + epsilon)


def epsilon_from_lambda(lam: float) -> float:
    if not 0.0 < lam < 1.0:
        raise ValueError(f"lambda must lie in (0, 1), got {lam}")
    return (1.0 - lam) / (1.0 + lam)


def _require_rank_one(model: SpaceModel):
    if model.roots is None or len(model.roots.roots) != 1:
        raise ValueError("this envelope requires a rank-one model with a single listed root")


def sharp_envelope_log(model: SpaceModel, t, r):
    """Log of the sharp envelope shape, constant slot 1.

    t^{-n/2} (1 + <a,H>) (1 + t + <a,H>)^{(m_a + m_2a)/2 - 1}
    * exp(-|rho|^2 t - <rho,H> - r^2/(4t)) for the single root a.
    The middle exponent matches the per-root contribution to the polynomial
    time exponent, so the 3-space factor is identically 1 and the plane
    factor is (1 + t + r)^{-1/2}, as in the closed-form estimates.
    """
    _require_rank_one(model)
    datum = model.roots.roots[0]
    t = np.asarray(t, dtype=float)
    r = np.asarray(r, dtype=float)
    alpha_h = datum.norm * r
    middle_exp = (datum.mult + datum.mult_double) / 2.0 - 1.0
    return (
        -model.n / 2.0 * np.log(t)
        + np.log1p(alpha_h)
        + middle_exp * np.log(1.0 + t + alpha_h)
        - model.rho_norm ** 2 * t
        - model.rho_dot(r)
        - r * r / (4.0 * t)
    )


def sharp_envelope(model: SpaceModel, t, r, c_lower: float = 1.0, c_upper: float = 1.0):
    """(lower, upper) evaluation of the sharp envelope; with the default
    constants both entries equal the shape value and callers bracket with
    fitted constants."""
    if np.any(np.asarray(t, dtype=float) <= 0.0) or np.any(np.asarray(r, dtype=float) < 0.0):
        raise ValueError("need t > 0 and r >= 0")
    shape = np.exp(sharp_envelope_log(model, t, r))
    return c_lower * shape, c_upper * shape


def kernel_upper_log(model: SpaceModel, t, r, rho_h=None):
    """Log of c=1 polynomial-Gaussian upper bound
    t^{-n/2} (1+t)^m (1+r)^A exp(-(|rho|^2 t + <rho,H> + r^2/(4t)))."""
    t = np.asarray(t, dtype=float)
    r = np.asarray(r, dtype=float)
    if rho_h is None:
        rho_h = model.rho_dot(r)
    return (
        -model.n / 2.0 * np.log(t)
        + model.m_exp * np.log1p(t)
        + model.A_exp * np.log1p(r)
        - (model.rho_norm ** 2 * t + rho_h + r * r / (4.0 * t))
    )


def kernel_upper(model: SpaceModel, t, r, rho_h=None):
    if np.any(np.asarray(t, dtype=float) <= 0.0) or np.any(np.asarray(r, dtype=float) < 0.0):
        raise ValueError("need t > 0 and r >= 0")
    return np.exp(kernel_upper_log(model, t, r, rho_h))


# ---------------------------------------------------------------------------
# on-diagonal derivative bounds via iterated integrals


def _repeated_integral(f, i: int, t: float) -> float:
    """i-fold iterated integral of f from 0, via the single-integral form
    int_0^t (t-s)^{i-1}/(i-1)! f(s) ds."""
    if i < 1:
        raise ValueError("iterated integral order must be >= 1")
    fact = math.factorial(i - 1)
    value, err = quad(lambda s: (t - s) ** (i - 1) / fact * f(s), 0.0, t,
                      epsabs=0.0, epsrel=1e-11, limit=300)
    return float(value)


@lru_cache(maxsize=65536)
def _power_f_iter(n_half: float, m: float, i: int, t: float) -> float:
    return _repeated_integral(lambda s: s ** n_half * (1.0 + s) ** (-m), i, t)


@lru_cache(maxsize=65536)
def _h3_diagonal_f_iter(i: int, t: float) -> float:
    return _repeated_integral(lambda s: (4.0 * math.pi * s) ** 1.5 * math.exp(s), i, t)


def grigoryan_f(model: SpaceModel, t):
    """The reciprocal on-diagonal profile f(t) = t^{n/2} (1+t)^{-m}."""
    t = np.asarray(t, dtype=float)
    return t ** (model.n / 2.0) * (1.0 + t) ** (-model.m_exp)


def grigoryan_f_iterated(model: SpaceModel, i: int, t: float) -> float:
    if i == 0:
        return float(grigoryan_f(model, t))
    return _power_f_iter(model.n / 2.0, model.m_exp, i, float(t))


def grigoryan_bound(model: SpaceModel, i: int, t: float) -> float:
    """Derivative bound 1/sqrt(f(t) f_{2i}(t)) with the model profile f.

    The profile must be increasing, i.e. n/2 > m, which holds for every
    model built here.  Bounds the i-th time derivative up to a constant.
    """
    if i < 1:
        raise ValueError("derivative order must be >= 1 (order 0 is the kernel bound itself)")
    if t <= 0.0:
        raise ValueError("time must be positive")
    f0 = float(grigoryan_f(model, t))
    f2i = grigoryan_f_iterated(model, 2 * i, t)
    return 1.0 / math.sqrt(f0 * f2i)


def grigoryan_f_lower_shape(model: SpaceModel, i: int, t):
    """Shape t^{(n/2)+i} (1+t)^{-m} of the analytic lower bound for f_i;
    valid up to the multiplicative constant from grigoryan_f_lower_constant."""
    t = np.asarray(t, dtype=float)
    return t ** (model.n / 2.0 + i) * (1.0 + t) ** (-model.m_exp)


def grigoryan_f_lower_constant(model: SpaceModel, i: int) -> float:
    """Proven constant k_i with f_i >= k_i * t^{(n/2)+i} (1+t)^{-m}: each
    integration step of s^a (1+s)^b costs a factor 1/(a + max(0,b) + 1)."""
    b = -model.m_exp
    out = 1.0
    for j in range(1, i + 1):
        out /= model.n / 2.0 + j + max(0.0, b)
    return out


def h3_exact_diagonal_f(t):
    """Reciprocal of the exact 3-space on-diagonal value: (4 pi t)^{3/2} e^t."""
    t = np.asarray(t, dtype=float)
    return (4.0 * math.pi * t) ** 1.5 * np.exp(t)


def h3_exact_diagonal_f_iterated(i: int, t: float) -> float:
    if i == 0:
        return float(h3_exact_diagonal_f(t))
    return _h3_diagonal_f_iter(i, float(t))


def grigoryan_bound_exact_h3(i: int, t: float) -> float:
    """Constant-free derivative bound on the 3-space: 1/sqrt(f f_{2i}) with
    f the reciprocal of the exact diagonal, which dominates 1/h_t(x,x)
    with equality."""
    if i < 1:
        raise ValueError("derivative order must be >= 1")
    if t <= 0.0:
        raise ValueError("time must be positive")
    f0 = float(h3_exact_diagonal_f(t))
    f2i = h3_exact_diagonal_f_iterated(2 * i, t)
    return 1.0 / math.sqrt(f0 * f2i)


# ---------------------------------------------------------------------------
# derivative-envelope propagation and its rate recurrence


def derivative_envelope_step(env_lo: EnvelopeBound, env_hi: EnvelopeBound,
                             epsilon: float) -> EnvelopeBound:
    """Given envelopes for a function (rates D, B, C) and its second
    derivative (rates D*, B*, C*, same polynomial part at alpha + 2), return
    the first-derivative envelope: alpha + 1, same beta/gamma, rates
    ((D+D*)/2, (B+B*)/2, (C* + C lam)/2) with lam = (1-eps)/(1+eps).

    Requires alpha > beta >= 0 and D >= D*, B >= B*, C >= C*.
    """
    lam = lambda_from_epsilon(epsilon)
    if not env_lo.alpha > env_lo.beta >= 0.0:
        raise ValueError("need alpha > beta >= 0 for the function envelope")
    if env_lo.D < env_hi.D or env_lo.B < env_hi.B or env_lo.C < env_hi.C:
        raise ValueError("need D >= D*, B >= B*, C >= C* between the two envelopes")
    if abs(env_hi.alpha - env_lo.alpha - 2.0) > 1e-12 or env_hi.beta != env_lo.beta \
            or env_hi.gamma_exp != env_lo.gamma_exp:
        raise ValueError("second-derivative envelope must share beta/gamma at alpha + 2")
    c_out = max(env_lo.c, env_hi.c) * (1.0 / epsilon + epsilon)
    return EnvelopeBound(
        alpha=env_lo.alpha + 1.0,
        beta=env_lo.beta,
        gamma_exp=env_lo.gamma_exp,
        D=(env_lo.D + env_hi.D) / 2.0,
        B=(env_lo.B + env_hi.B) / 2.0,
        C=(env_hi.C + env_lo.C * lam) / 2.0,
        c=c_out,
    )


def recurrence_grid(epsilon: float, i_max: int, l_max: int) -> BoundGrid:
    """Iterate the rate recurrences
        beta[l][i]  = (beta[l-1][i-1]  + beta[l-1][i+1]) / 2
        gamma[l][i] = (lam * gamma[l-1][i-1] + gamma[l-1][i+1]) / 2
    from beta[0][i] = gamma[0][i] = 0 (i >= 1), column 0 pinned at 1.

    The i-axis is padded by l_max cells so the reported block never sees the
    truncation boundary: the i+1 dependency travels one column per step.
    """
    lam = lambda_from_epsilon(epsilon)
    if i_max < 0 or l_max < 0:
        raise ValueError("grid extents must be nonnegative")
    width = i_max + l_max + 2
    beta = np.zeros(width)
    gamma = np.zeros(width)
    beta[0] = gamma[0] = 1.0
    betas = [beta[: i_max + 1].copy()]
    gammas = [gamma[: i_max + 1].copy()]
    for _ in range(l_max):
        nb = np.zeros_like(beta)
        ng = np.zeros_like(gamma)
        nb[0] = ng[0] = 1.0
        nb[1:-1] = 0.5 * (beta[:-2] + beta[2:])
        ng[1:-1] = 0.5 * (lam * gamma[:-2] + gamma[2:])
        nb[-1] = 0.5 * beta[-2]
        ng[-1] = 0.5 * lam * gamma[-2]
        beta, gamma = nb, ng
        betas.append(beta[: i_max + 1].copy())
        gammas.append(gamma[: i_max + 1].copy())
    return BoundGrid(epsilon=epsilon, lambda_eps=lam,
                     beta=np.asarray(betas), gamma=np.asarray(gammas))


def recurrence_grid_from_lambda(lam: float, i_max: int, l_max: int) -> BoundGrid:
    return recurrence_grid(epsilon_from_lambda(lam), i_max, l_max)


def gamma_limit(epsilon: float, i: int):
    """Closed-form limit of the Gaussian-rate column: (1 - sqrt(1 - lam))^i."""
    lam = lambda_from_epsilon(epsilon)
    return gamma_limit_from_lambda(lam, i)


def gamma_limit_from_lambda(lam: float, i) -> float:
    if not 0.0 < lam < 1.0:
        raise ValueError(f"lambda must lie in (0, 1), got {lam}")
    return (1.0 - math.sqrt(1.0 - lam)) ** np.asarray(i)


# ---------------------------------------------------------------------------
# main right-hand sides


def theorem1_rhs(model: SpaceModel, i: int, t, r, epsilon: float, rho_h=None):
    """Log of the derivative bound shape
    t^{-(n/2)-i} exp(-(1-eps)(|rho|^2 t + <rho,H> + r^2/(4t))), c = 1."""
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    t = np.asarray(t, dtype=float)
    r = np.asarray(r, dtype=float)
    if rho_h is None:
        rho_h = model.rho_dot(r)
    return (
        -(model.n / 2.0 + i) * np.log(t)
        - (1.0 - epsilon) * (model.rho_norm ** 2 * t + rho_h + r * r / (4.0 * t))
    )


def gradient_rhs_log(model: SpaceModel, t, r, epsilon: float, rho_h=None):
    t = np.asarray(t, dtype=float)
    r = np.asarray(r, dtype=float)
    if rho_h is None:
        rho_h = model.rho_dot(r)
    return (
        -(model.n + 1.0) / 2.0 * np.log(t)
        - (1.0 - epsilon) * (model.rho_norm ** 2 * t + rho_h + r * r / (4.0 * t))
    )


def gradient_rhs(model: SpaceModel, t, r, epsilon: float, rho_h=None):
    """Gradient bound shape t^{-(n+1)/2} exp(-(1-eps)(...)), linear value."""
    return np.exp(gradient_rhs_log(model, t, r, epsilon, rho_h))


def li_yau_rhs(n: int, curvature_sq: float, t, gamma: float):
    """Right-hand side n R^2 g^2 / (sqrt(2)(g-1)) + n g^2 / (2t) of the
    curvature gradient inequality, with R^2 the Ricci lower-bound scale."""
    if gamma <= 1.0:
        raise ValueError("the inequality needs gamma > 1")
    t = np.asarray(t, dtype=float)
    return n * curvature_sq * gamma ** 2 / (math.sqrt(2.0) * (gamma - 1.0)) \
        + n * gamma ** 2 / (2.0 * t)


def li_yau_gap(model: SpaceModel, t: float, r: float, gamma: float = 2.0) -> float:
    """RHS minus LHS of the curvature gradient inequality
    |grad h|^2/h^2 - g (1/h) dh/dt <= n R^2 g^2/(sqrt2 (g-1)) + n g^2/(2t)
    with R^2 = n - 1, evaluated with the exact oracles.  Nonnegative gap
    means the inequality holds at (t, r).
    """
    if t <= 0.0 or r <= 0.0:
        raise ValueError("need t > 0 and r > 0")
    if model.n == 3:
        grad_log_sq = (1.0 / r - 1.0 / math.tanh(r) - r / (2.0 * t)) ** 2
        dt_over_h = float(oracle.h3_dt_prefactor(t, r, 1))
    elif model.n == 2:
        h = math.exp(oracle.h2_log(t, r))
        grad_log_sq = (oracle.radial_gradient("h2", t, r) / h) ** 2
        fd = oracle.fd_time_derivative(lambda tt, rr: math.exp(oracle.h2_log(tt, rr)), 1, t, r)
        dt_over_h = fd.value / h
    else:
        raise ValueError("gap evaluation is wired to the plane and 3-space oracles")
    lhs = grad_log_sq - gamma * dt_over_h
    rhs = float(li_yau_rhs(model.n, model.n - 1.0, t, gamma))
    return rhs - lhs


@dataclass(frozen=True)
class CartanHadamardParams:
    c: float
    A: float
    B: float
    C: float
    alpha: float

    def __post_init__(self):
        if min(self.c, self.A, self.B, self.C, self.alpha) <= 0.0:
            raise ValueError("all rates must be positive")


def cartan_hadamard_rhs(params: CartanHadamardParams, i: int, t, d, epsilon: float):
    """Derivative bound shape on a Cartan-Hadamard manifold whose kernel obeys
    c / min(1, t^alpha) * exp(-At - Bd - C d^2/t):
    returns c / min(1, t^(alpha+i)) * exp(-(1-eps)(At + Bd + C d^2/t))."""
    if not 0.0 <= epsilon < 1.0:
        raise ValueError("epsilon must lie in [0, 1)")
    t = np.asarray(t, dtype=float)
    d = np.asarray(d, dtype=float)
    log_val = (
        math.log(params.c)
        - np.minimum(0.0, (params.alpha + i) * np.log(t))
        - (1.0 - epsilon) * (params.A * t + params.B * d + params.C * d * d / t)
    )
    return np.exp(log_val)


# ---------------------------------------------------------------------------
# fitted-constant grid protocols


def grid_points(t_range, r_range, nt: int, nr: int, t_scale: str = "log",
                r_scale: str = "linear"):
    """Meshgrid (T, R) over the requested ranges, log or linear per axis."""
    t_lo, t_hi = t_range
    r_lo, r_hi = r_range
    t = np.geomspace(t_lo, t_hi, nt) if t_scale == "log" else np.linspace(t_lo, t_hi, nt)
    r = np.geomspace(r_lo, r_hi, nr) if r_scale == "log" else np.linspace(r_lo, r_hi, nr)
    return np.meshgrid(t, r, indexing="ij")


def fit_constant(log_oracle, log_bound, grid) -> float:
    """Max over the grid of oracle/bound, computed as exp(max log-difference).

    Both evaluators take the grid coordinate arrays and return log values.
    Deterministic for a fixed grid.  Raises ShapeMismatchError when the
    oracle exceeds the bound by more than e^700.
    """
    coords = grid if isinstance(grid, (tuple, list)) else (grid,)
    lo = np.asarray(log_oracle(*coords), dtype=float)
    lb = np.asarray(log_bound(*coords), dtype=float)
    diff = lo - lb
    finite = np.isfinite(diff)
    if not finite.any():
        raise ValueError("no finite log-ratio on the grid")
    worst = float(np.max(diff[finite]))
    if worst > 700.0:
        raise ShapeMismatchError(f"oracle/bound ratio reaches e^{worst:.1f}: shape mismatch")
    return math.exp(worst)


@dataclass(frozen=True)
class TwoGridFit:
    c_coarse: float
    c_fine: float

    @property
    def stability(self) -> float:
        return self.c_fine / self.c_coarse

    def stable_within(self, factor: float = 1.05) -> bool:
        return self.c_fine <= factor * self.c_coarse


def two_grid_fit(log_oracle, log_bound, coarse_grid, fine_grid) -> TwoGridFit:
    """Fit the constant on the coarse grid, re-fit on the fine grid; the
    bound with the coarse constant covers the fine grid when stability
    stays within the protocol factor."""
    return TwoGridFit(
        c_coarse=fit_constant(log_oracle, log_bound, coarse_grid),
        c_fine=fit_constant(log_oracle, log_bound, fine_grid),
    )
