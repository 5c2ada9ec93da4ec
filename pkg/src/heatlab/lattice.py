"""Discrete isometry groups of the hyperbolic plane and 3-space.

Upper half-space coordinates throughout: a point is (z, h) with z complex
(real for the plane) and height h > 0; distance comes from the standard
cosh identity.  Orbit enumeration is certified complete below its cutoff:
cyclic groups via the translation-length bound, ping-pong groups via nested
isometric-disk images, aborting when the configuration cannot certify.
"""

from __future__ import annotations

import cmath
import csv
import math
from dataclasses import dataclass

import numpy as np

from .config import ConfigError, parse_config, parse_floats
from .rootspace import AlphaTriple, SpaceModel, admissible_alpha_triple

_DET_TOL = 1e-9


class EnumerationError(RuntimeError):
    """Orbit enumeration cannot certify completeness below the cutoff."""


class GroupSpecError(ValueError):
    """Generator list violates the family's structural requirements."""


Point = tuple[complex, float]


def as_point(p) -> Point:
    """Normalize (x, h), (z, h), or (x, y, h) to the (complex, height) form."""
    if isinstance(p, tuple) and len(p) == 2:
        z, h = p
        return complex(z), float(h)
    if isinstance(p, (list, np.ndarray)) and len(p) == 2:
        return complex(p[0]), float(p[1])
    if isinstance(p, (tuple, list, np.ndarray)) and len(p) == 3:
        return complex(float(p[0]), float(p[1])), float(p[2])
    raise ValueError(f"cannot interpret {p!r} as an upper half-space point")


def distance(p, q) -> float:
    """Hyperbolic distance: cosh d = 1 + (|z_p - z_q|^2 + (h_p - h_q)^2) / (2 h_p h_q)."""
    zp, hp = as_point(p)
    zq, hq = as_point(q)
    if hp <= 0.0 or hq <= 0.0:
        raise ValueError("points must have positive height")
    num = abs(zp - zq) ** 2 + (hp - hq) ** 2
    return math.acosh(1.0 + num / (2.0 * hp * hq))


def mobius_apply(mat: np.ndarray, p) -> Point:
    """Action of a unimodular 2x2 matrix on the upper half-space."""
    z, h = as_point(p)
    a, b = complex(mat[0, 0]), complex(mat[0, 1])
    c, d = complex(mat[1, 0]), complex(mat[1, 1])
    czd = c * z + d
    denom = abs(czd) ** 2 + abs(c) ** 2 * h * h
    if denom <= 0.0:
        raise ValueError("degenerate image point")
    z_new = ((a * z + b) * czd.conjugate() + a * c.conjugate() * h * h) / denom
    return z_new, h / denom


def translation_length(mat: np.ndarray) -> float:
    """Translation length of a loxodromic element: 2 |Re acosh(tr/2)|."""
    tr = complex(mat[0, 0] + mat[1, 1])
    return 2.0 * abs(cmath.acosh(tr / 2.0).real)


def isometric_circle(mat: np.ndarray) -> tuple[complex, float]:
    """Boundary circle |cz + d| = 1 of the matrix: center -d/c, radius 1/|c|."""
    c, d = complex(mat[1, 0]), complex(mat[1, 1])
    if abs(c) < 1e-14:
        raise GroupSpecError("matrix fixes infinity; no isometric circle")
    return -d / c, 1.0 / abs(c)


def mobius_circle_image(mat: np.ndarray, center: complex, radius: float) -> tuple[complex, float]:
    """Image circle under the boundary action: the center of the image is the
    image of the point symmetric to the pole, the radius follows from any
    boundary point."""
    a, b = complex(mat[0, 0]), complex(mat[0, 1])
    c, d = complex(mat[1, 0]), complex(mat[1, 1])

    def act(z: complex) -> complex:
        return (a * z + b) / (c * z + d)

    if abs(c) < 1e-14:
        scale = abs(a / d)
        return act(center), scale * radius
    pole = -d / c
    offset = pole - center
    if abs(abs(offset) - radius) < 1e-12 * max(1.0, radius):
        raise EnumerationError("disk image degenerates to a half-plane; cannot certify pruning")
    mirror = center + radius * radius / offset.conjugate()
    new_center = act(mirror)
    new_radius = abs(new_center - act(center + radius))
    return new_center, new_radius


def hyperplane_distance(p, center: complex, radius: float) -> float:
    """Distance from a point to the geodesic hyperplane over a boundary
    circle; 0 when the point lies inside or on the dome.

    sinh(dist) = (|z - c|^2 + h^2 - r^2) / (2 r h) for outside points.
    """
    z, h = as_point(p)
    if radius <= 0.0:
        # dome image shrank below float resolution: treat as infinitely far
        return math.inf
    num = abs(z - center) ** 2 + h * h - radius * radius
    if num <= 0.0:
        return 0.0
    return math.asinh(num / (2.0 * radius * h))


@dataclass(frozen=True)
class GroupSpec:
    """Generators of a discrete torsion-free group acting on the plane (dim 2,
    real matrices) or 3-space (dim 3, complex matrices)."""

    dim: int
    generators: tuple[np.ndarray, ...]
    family: str  # trivial | cyclic | schottky | free

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise GroupSpecError(f"dim must be 2 or 3, got {self.dim}")
        if self.family not in ("trivial", "cyclic", "schottky", "free"):
            raise GroupSpecError(f"unknown family {self.family!r}")
        mats = tuple(np.asarray(g, dtype=complex) for g in self.generators)
        object.__setattr__(self, "generators", mats)
        for g in mats:
            if g.shape != (2, 2):
                raise GroupSpecError("generators must be 2x2 matrices")
            det = g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0]
            if abs(det - 1.0) > _DET_TOL:
                raise GroupSpecError(f"generator determinant {det} is not 1")
            if self.dim == 2 and np.max(np.abs(g.imag)) > _DET_TOL:
                raise GroupSpecError("plane generators must be real matrices")
        if self.family == "trivial":
            if mats:
                raise GroupSpecError("trivial family takes no generators")
            return
        if not mats:
            raise GroupSpecError(f"{self.family} family needs at least one generator")
        if self.family == "cyclic" and len(mats) != 1:
            raise GroupSpecError("cyclic family takes exactly one generator")
        if self.family in ("cyclic", "schottky"):
            for g in mats:
                if abs(g[0, 0] + g[1, 1]) <= 2.0 + _DET_TOL:
                    raise GroupSpecError(
                        f"generator trace {g[0, 0] + g[1, 1]} is not loxodromic (|trace| > 2)"
                    )
        if self.family == "schottky":
            self._letter_circles()  # validates disjointness at construction

    def _letters(self) -> list[np.ndarray]:
        """Generators and inverses, inverse of letter j at index j ^ 1."""
        letters = []
        for g in self.generators:
            inv = np.array([[g[1, 1], -g[0, 1]], [-g[1, 0], g[0, 0]]], dtype=complex)
            letters.extend([g, inv])
        return letters

    def _letter_circles(self) -> list[tuple[complex, float]]:
        letters = self._letters()
        try:
            circles = [isometric_circle(g) for g in letters]
        except GroupSpecError as exc:
            raise GroupSpecError(f"ping-pong disks unavailable: {exc}") from exc
        for i in range(len(circles)):
            for j in range(i + 1, len(circles)):
                ci, ri = circles[i]
                cj, rj = circles[j]
                if abs(ci - cj) <= ri + rj:
                    raise GroupSpecError(
                        f"isometric disks {i} and {j} are not disjoint; "
                        "not a valid ping-pong configuration"
                    )
        return circles

    def orbit(self, x, y, r_max: float) -> "OrbitSet":
        return enumerate_orbit(self, x, y, r_max)


@dataclass(frozen=True)
class OrbitSet:
    """Sorted orbit distances d(x, gy) with word-length provenance, complete
    below r_max (no missing orbit point at distance <= r_max)."""

    x: Point
    y: Point
    distances: np.ndarray
    word_lengths: np.ndarray
    r_max: float
    exhaustive: bool = False  # the whole group was enumerated
    family: str = ""

    @property
    def d_min(self) -> float:
        return float(self.distances[0])

    def __len__(self) -> int:
        return int(self.distances.size)

    def to_csv(self, path: str) -> None:
        with open(path, "w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(["distance", "word_length"])
            for d, w in zip(self.distances, self.word_lengths):
                writer.writerow([f"{float(d):.17g}", int(w)])


def _sorted_orbit(x: Point, y: Point, records: list[tuple[float, int]], r_max: float,
                  exhaustive: bool, family: str) -> OrbitSet:
    if not records:
        raise ValueError(
            f"no orbit point within r_max={r_max}; the quotient distance d(x, y) "
            "already exceeds the cutoff"
        )
    records.sort()
    return OrbitSet(
        x=x, y=y,
        distances=np.array([d for d, _ in records], dtype=float),
        word_lengths=np.array([w for _, w in records], dtype=int),
        r_max=float(r_max),
        exhaustive=exhaustive,
        family=family,
    )


def enumerate_orbit(group: GroupSpec, x, y, r_max: float,
                    node_budget: int = 2_000_000) -> OrbitSet:
    """All orbit distances d(x, gy) <= r_max, certified complete.

    Cyclic: d(y, g^k y) >= |k| L bounds the word range directly.  Ping-pong
    families: depth-first search over reduced words; the subtree below a
    prefix w with next letter b lies inside the image under w of the solid
    dome over the isometric disk of b^{-1}, so the search prunes once that
    dome is farther from x than r_max (plus the basepoint slack).
    """
    if r_max <= 0.0:
        raise ValueError("r_max must be positive")
    xp, yp = as_point(x), as_point(y)
    if group.family == "trivial":
        d0 = distance(xp, yp)
        records = [(d0, 0)] if d0 <= r_max else []
        return _sorted_orbit(xp, yp, records, r_max, exhaustive=True, family="trivial")

    if group.family == "cyclic":
        g = group.generators[0]
        length = translation_length(g)
        if length <= 1e-12:
            raise EnumerationError("generator has zero translation length; cannot bound words")
        d_xy = distance(xp, yp)
        k_max = int(math.ceil((r_max + d_xy) / length)) + 1
        records = []
        ginv = np.array([[g[1, 1], -g[0, 1]], [-g[1, 0], g[0, 0]]], dtype=complex)
        for mat0, sign in ((g, 1), (ginv, -1)):
            acc = np.eye(2, dtype=complex)
            for k in range(1, k_max + 1):
                acc = acc @ mat0
                d = distance(xp, mobius_apply(acc, yp))
                if d <= r_max:
                    records.append((d, k))
        if d_xy <= r_max:
            records.append((d_xy, 0))
        return _sorted_orbit(xp, yp, records, r_max, exhaustive=False, family="cyclic")

    # schottky / free: need a certified ping-pong configuration
    try:
        circles = group._letter_circles()
    except GroupSpecError as exc:
        raise EnumerationError(
            f"free-family generators admit no disjoint-disk certificate: {exc}"
        ) from exc
    letters = group._letters()
    n_letters = len(letters)
    # reference point outside every dome: height above the largest radius
    ref = (0.0 + 0.0j, 1.0 + max(r for _, r in circles))
    slack = distance(ref, yp)

    records = []
    d_xy = distance(xp, yp)
    if d_xy <= r_max:
        records.append((d_xy, 0))

    visited = 0
    # stack of (matrix, last_letter, depth)
    stack: list[tuple[np.ndarray, int, int]] = [(np.eye(2, dtype=complex), -1, 0)]
    while stack:
        mat, last, depth = stack.pop()
        for b in range(n_letters):
            if last >= 0 and b == (last ^ 1):
                continue
            center, radius = circles[b ^ 1]
            try:
                img_center, img_radius = mobius_circle_image(mat, center, radius)
            except EnumerationError:
                raise EnumerationError(
                    "pruning certificate degenerated; generators too close to parabolic"
                )
            if hyperplane_distance(xp, img_center, img_radius) - slack > r_max:
                continue
            child = mat @ letters[b]
            visited += 1
            if visited > node_budget:
                raise EnumerationError(
                    f"node budget {node_budget} exhausted before certifying r_max={r_max}; "
                    "disks may be nearly tangent"
                )
            d = distance(xp, mobius_apply(child, yp))
            if d <= r_max:
                records.append((d, depth + 1))
            stack.append((child, b, depth + 1))
    return _sorted_orbit(xp, yp, records, r_max, exhaustive=False, family=group.family)


def counting_function(orbit: OrbitSet, radius: float) -> int:
    """Number of orbit points within the given radius."""
    if radius > orbit.r_max * (1.0 + 1e-12) and not orbit.exhaustive:
        raise ValueError(f"radius {radius} exceeds the certified range {orbit.r_max}")
    return int(np.searchsorted(orbit.distances, radius, side="right"))


@dataclass(frozen=True)
class CriticalExponentEstimate:
    estimate: float
    lower: float
    upper: float
    insufficient_data: bool = False

    @property
    def half_width(self) -> float:
        return (self.upper - self.lower) / 2.0

    @property
    def conservative(self) -> float:
        """Estimate plus confidence half-width, for use in tail bounds."""
        return max(self.estimate + self.half_width, 0.0)


def critical_exponent(orbit: OrbitSet) -> CriticalExponentEstimate:
    """Least-squares slope of log N(R) against R over the upper half of the
    certified range; the interval comes from a second, narrower window."""
    if len(orbit) == 1:
        return CriticalExponentEstimate(0.0, 0.0, 0.0, insufficient_data=False)
    if len(orbit) < 50:
        return CriticalExponentEstimate(0.0, 0.0, 0.0, insufficient_data=True)

    def window_slope(lo_frac: float) -> float:
        rs = np.linspace(lo_frac * orbit.r_max, orbit.r_max, 25)
        counts = np.array([counting_function(orbit, r) for r in rs], dtype=float)
        mask = counts > 0
        if mask.sum() < 3:
            return math.nan
        coeffs = np.polyfit(rs[mask], np.log(counts[mask]), 1)
        return float(coeffs[0])

    s1 = window_slope(0.5)
    s2 = window_slope(0.75)
    if math.isnan(s1) or math.isnan(s2):
        return CriticalExponentEstimate(0.0, 0.0, 0.0, insufficient_data=True)
    lo, hi = sorted((s1, s2))
    return CriticalExponentEstimate(estimate=s1, lower=lo, upper=hi)


@dataclass(frozen=True)
class PoincareEval:
    s: float
    partial_sum: float
    n_terms: int
    tail_bound: float
    delta_used: float

    @property
    def bracket(self) -> tuple[float, float]:
        return self.partial_sum, self.partial_sum + self.tail_bound


def poincare_series(orbit: OrbitSet, s: float, delta: float) -> PoincareEval:
    """Partial sum of exp(-s d) over the enumerated orbit plus a geometric
    tail bound from the counting estimate N(R) <= c e^{delta R}.

    The counting constant is fitted on the enumerated range; the tail sums
    c e^{delta (k+1)} e^{-k s} in closed form over shells k >= floor(r_max).
    """
    if not s > delta:
        raise ValueError(f"series certified to converge only for s > delta ({s} <= {delta})")
    distances = orbit.distances
    partial = float(np.sum(np.exp(-s * distances)))
    if orbit.exhaustive:
        return PoincareEval(s=s, partial_sum=partial, n_terms=len(orbit),
                            tail_bound=0.0, delta_used=delta)
    ks = np.arange(0.0, math.floor(orbit.r_max) + 1.0)
    counts = np.array([np.count_nonzero(distances <= k) for k in ks], dtype=float)
    mask = counts > 0
    c_count = float(np.max(counts[mask] * np.exp(-delta * ks[mask]))) if mask.any() else 1.0
    k0 = math.floor(orbit.r_max)
    gap = s - delta
    tail = c_count * math.exp(delta) * math.exp(-k0 * gap) / (1.0 - math.exp(-gap))
    return PoincareEval(s=s, partial_sum=partial, n_terms=len(orbit),
                        tail_bound=tail, delta_used=delta)


# ---------------------------------------------------------------------------
# quotient-space bound shapes


def theorem2_rhs_log(model: SpaceModel, delta: float, triple: AlphaTriple, i: int,
                     t, d_m, epsilon: float):
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    if not admissible_alpha_triple(triple, delta, model):
        raise ValueError(f"triple {triple} is not admissible for delta={delta}")
    t = np.asarray(t, dtype=float)
    d_m = np.asarray(d_m, dtype=float)
    rho_sq = model.rho_norm ** 2
    return (
        -(model.n / 2.0 + i) * np.log(t)
        - (1.0 - epsilon) * (
            (1.0 - triple.a1) * rho_sq * t
            + (triple.a2 - delta) * d_m
            + (1.0 - triple.a3) * d_m * d_m / (4.0 * t)
        )
    )


def theorem2_rhs(model: SpaceModel, delta: float, triple: AlphaTriple, i: int,
                 t, d_m, epsilon: float):
    """Quotient derivative bound shape
    t^{-(n/2)-i} exp(-(1-eps)[(1-a1)|rho|^2 t + (a2-delta) d + (1-a3) d^2/(4t)]).

    The series factor at exponent eps + delta is supplied by the caller.
    """
    return np.exp(theorem2_rhs_log(model, delta, triple, i, t, d_m, epsilon))


def splitting_slack(model: SpaceModel, triple: AlphaTriple, t, d_m):
    """The quadratic form a1 |rho|^2 t + (rho_m - a2) d + a3 d^2/(4t) given
    away by an admissible splitting; nonnegative, zero exactly at the
    boundary case a1 = a3 = 0, a2 = rho_m."""
    t = np.asarray(t, dtype=float)
    d_m = np.asarray(d_m, dtype=float)
    return (triple.a1 * model.rho_norm ** 2 * t
            + (model.rho_m - triple.a2) * d_m
            + triple.a3 * d_m * d_m / (4.0 * t))


def quotient_regime_rhs(regime: int, model: SpaceModel, delta: float, s_or_eps: float,
                        t, d_m):
    """Quotient kernel bound shapes in the two classical regimes.

    Regime 1 (delta < rho_m, series exponent s in (delta, rho_m)):
        t^{-n/2} (1+t)^m exp(-|rho|^2 t - d^2/(4t)).
    Regime 2 (rho_m <= delta <= rho_m + |rho|, margin eps > 0):
        t^{-n/2} exp(-(|rho|^2 - (delta - rho_m + eps)^2) t).
    The series factor is supplied by the caller.
    """
    t = np.asarray(t, dtype=float)
    d_m = np.asarray(d_m, dtype=float)
    rho_sq = model.rho_norm ** 2
    if regime == 1:
        if not 0.0 <= delta < model.rho_m:
            raise ValueError(f"regime 1 needs delta in [0, rho_m), got {delta}")
        if not delta < s_or_eps < model.rho_m:
            raise ValueError(f"regime 1 needs s in (delta, rho_m), got {s_or_eps}")
        return np.exp(-model.n / 2.0 * np.log(t) + model.m_exp * np.log1p(t)
                      - rho_sq * t - d_m * d_m / (4.0 * t))
    if regime == 2:
        if not model.rho_m <= delta <= model.rho_m + model.rho_norm:
            raise ValueError(f"regime 2 needs delta in [rho_m, rho_m + |rho|], got {delta}")
        if not s_or_eps > 0.0:
            raise ValueError("regime 2 needs a positive margin")
        rate = rho_sq - (delta - model.rho_m + s_or_eps) ** 2
        return np.exp(-model.n / 2.0 * np.log(t) - rate * t)
    raise ValueError(f"regime must be 1 or 2, got {regime}")


# ---------------------------------------------------------------------------
# group-spec config format


def parse_group(text: str) -> GroupSpec:
    """Parse the group config format::

        [group]
        dim = 2
        family = schottky
        generator = 2,3,1,2          # a,b,c,d row-major (plane)
        generator = 6,0,35,0,1,0,6,0 # re,im pairs row-major (3-space)
    """
    config = parse_config(text)
    section = config.sections.get("group") or config.section("")
    dim = section.get_int("dim")
    family = section.get("family")
    if dim is None or family is None:
        raise ConfigError("group config needs dim and family keys")
    mats = []
    for raw in section.get_list("generator"):
        values = parse_floats(raw)
        if dim == 2:
            if len(values) != 4:
                raise ConfigError(f"plane generator needs 4 entries, got {raw!r}")
            mats.append(np.array(values, dtype=float).reshape(2, 2))
        else:
            if len(values) != 8:
                raise ConfigError(f"3-space generator needs 8 entries (re,im pairs), got {raw!r}")
            pairs = np.array(values, dtype=float).reshape(4, 2)
            mats.append((pairs[:, 0] + 1j * pairs[:, 1]).reshape(2, 2))
    try:
        return GroupSpec(dim=dim, generators=tuple(mats), family=family)
    except GroupSpecError as exc:
        raise ConfigError(str(exc)) from exc


def load_group(path: str) -> GroupSpec:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_group(handle.read())
