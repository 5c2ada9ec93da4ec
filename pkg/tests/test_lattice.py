import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from heatlab import lattice
from heatlab.config import ConfigError
from heatlab.lattice import (
    EnumerationError,
    GroupSpec,
    GroupSpecError,
    counting_function,
    critical_exponent,
    distance,
    enumerate_orbit,
    mobius_apply,
    parse_group,
    poincare_series,
    quotient_regime_rhs,
    splitting_slack,
    theorem2_rhs,
    translation_length,
)
from heatlab.rootspace import AlphaTriple, build_real_hyperbolic

H3 = build_real_hyperbolic(3)
COTH_1 = 1.0 / math.tanh(1.0)


def axis_group(translation: float, dim: int = 2) -> GroupSpec:
    half = math.exp(translation / 2.0)
    mat = np.array([[half, 0.0], [0.0, 1.0 / half]],
                   dtype=complex if dim == 3 else float)
    return GroupSpec(dim=dim, generators=(mat,), family="cyclic")


def schottky_generator(center: float, radius: float) -> np.ndarray:
    # pairs the disks at -center and +center of the given radius
    u, r = center, radius
    return np.array([[u / r, (u * u - r * r) / r], [1.0 / r, u / r]])


def schottky_pair() -> GroupSpec:
    return GroupSpec(dim=2,
                     generators=(schottky_generator(2.0, 1.0), schottky_generator(6.0, 1.0)),
                     family="schottky")


class TestGeometry:
    def test_distance_axis_points(self):
        assert distance((0.0, 1.0), (0.0, math.e)) == pytest.approx(1.0, rel=1e-14)

    def test_distance_symmetric(self):
        p, q = (0.3, 0.7), (-1.2, 2.5)
        assert distance(p, q) == pytest.approx(distance(q, p), rel=1e-15)

    def test_mobius_is_isometry(self):
        rng = np.random.default_rng(7)
        for _ in range(25):
            a, b, c = rng.normal(size=3)
            mat = np.array([[math.exp(a), b], [c, (1.0 + b * c) / math.exp(a)]])
            p = (rng.normal(), rng.uniform(0.2, 3.0))
            q = (rng.normal(), rng.uniform(0.2, 3.0))
            assert distance(mobius_apply(mat, p), mobius_apply(mat, q)) == pytest.approx(
                distance(p, q), rel=1e-10)

    def test_mobius_h3_isometry(self):
        rng = np.random.default_rng(11)
        for _ in range(25):
            a = rng.normal() + 1j * rng.normal()
            b = rng.normal() + 1j * rng.normal()
            c = rng.normal() + 1j * rng.normal()
            # complete to determinant one
            a = a if abs(a) > 0.3 else a + 1.0
            d = (1.0 + b * c) / a
            mat = np.array([[a, b], [c, d]], dtype=complex)
            p = (rng.normal() + 1j * rng.normal(), rng.uniform(0.2, 3.0))
            q = (rng.normal() + 1j * rng.normal(), rng.uniform(0.2, 3.0))
            assert distance(mobius_apply(mat, p), mobius_apply(mat, q)) == pytest.approx(
                distance(p, q), rel=1e-9)

    def test_translation_length(self):
        g = axis_group(2.0).generators[0]
        assert translation_length(g) == pytest.approx(2.0, rel=1e-13)


class TestGroupSpec:
    def test_rejects_elliptic_cyclic(self):
        rot = np.array([[math.cos(0.4), -math.sin(0.4)], [math.sin(0.4), math.cos(0.4)]])
        with pytest.raises(GroupSpecError):
            GroupSpec(dim=2, generators=(rot,), family="cyclic")

    def test_rejects_parabolic_cyclic(self):
        par = np.array([[1.0, 1.0], [0.0, 1.0]])
        with pytest.raises(GroupSpecError):
            GroupSpec(dim=2, generators=(par,), family="cyclic")

    def test_rejects_bad_determinant(self):
        with pytest.raises(GroupSpecError):
            GroupSpec(dim=2, generators=(np.array([[2.0, 0.0], [0.0, 1.0]]),), family="cyclic")

    def test_schottky_disjoint_disks_accepted(self):
        schottky_pair()

    def test_schottky_overlapping_disks_rejected(self):
        with pytest.raises(GroupSpecError):
            GroupSpec(dim=2,
                      generators=(schottky_generator(2.0, 1.0), schottky_generator(3.5, 1.0)),
                      family="schottky")


class TestEnumerateOrbit:
    def test_cyclic_distances(self):
        group = axis_group(2.0)
        orbit = enumerate_orbit(group, (0.0, 1.0), (0.0, 1.0), 10.0)
        expected = [0.0, 2.0, 2.0, 4.0, 4.0, 6.0, 6.0, 8.0, 8.0, 10.0, 10.0]
        assert np.allclose(orbit.distances, expected, atol=1e-12)
        assert list(orbit.word_lengths) == [0, 1, 1, 2, 2, 3, 3, 4, 4, 5, 5]

    def test_trivial_group(self):
        group = GroupSpec(dim=2, generators=(), family="trivial")
        orbit = enumerate_orbit(group, (0.0, 1.0), (1.0, 2.0), 6.0)
        assert len(orbit) == 1 and orbit.exhaustive
        assert orbit.distances[0] == pytest.approx(distance((0.0, 1.0), (1.0, 2.0)))

    def test_schottky_exponential_growth(self):
        group = schottky_pair()
        p = (0.0, 2.0)
        orbit = enumerate_orbit(group, p, p, 20.0)
        assert len(orbit) >= 50
        est = critical_exponent(orbit)
        assert not est.insufficient_data
        assert 0.0 < est.estimate < 1.0  # plane: delta <= 2 rho_norm = 1

    def test_schottky_matches_brute_force_exactly(self):
        # independent oracle: enumerate all reduced words to length 6 directly.
        # The disk gap is acosh(7), so any word of length >= 7 moves the
        # basepoint beyond 6 * acosh(7) > 15 and the brute list is complete
        # below the cut; the certified orbit must match it as a multiset.
        group = schottky_pair()
        p = (0.0, 2.0)
        letters = group._letters()
        mats = [np.eye(2)]
        frontier = {(): np.eye(2)}
        for _ in range(6):
            nxt = {}
            for word, mat in frontier.items():
                for j, g in enumerate(letters):
                    if word and word[-1] == (j ^ 1):
                        continue
                    nxt[word + (j,)] = mat @ g
            mats.extend(nxt.values())
            frontier = nxt
        brute = sorted(
            d for d in (distance(p, mobius_apply(m, p)) for m in mats) if d <= 15.0
        )
        orbit = enumerate_orbit(group, p, p, 15.0)
        assert len(orbit) == len(brute)
        assert np.allclose(orbit.distances, brute, atol=1e-9)

    def test_schottky_h2_h3_cross_model(self):
        # real matrices act identically on the half-plane and on the
        # real-z slice of the half-space
        gens = (schottky_generator(2.0, 1.0), schottky_generator(6.0, 1.0))
        plane = GroupSpec(dim=2, generators=gens, family="schottky")
        space = GroupSpec(dim=3, generators=tuple(g.astype(complex) for g in gens),
                          family="schottky")
        a = enumerate_orbit(plane, (0.0, 2.0), (0.0, 2.0), 12.0)
        b = enumerate_orbit(space, (0j, 2.0), (0j, 2.0), 12.0)
        assert len(a) == len(b)
        assert np.allclose(a.distances, b.distances, atol=1e-10)

    def test_schottky_h3_complex_conjugated(self):
        # translating the configuration off the real axis keeps the disks
        # rigid, so the conjugated group is Schottky with complex entries and
        # the orbit distances are conjugation-invariant
        shift = np.array([[1.0, 2.0j], [0.0, 1.0]], dtype=complex)
        shift_inv = np.array([[1.0, -2.0j], [0.0, 1.0]], dtype=complex)
        gens = tuple(shift @ g.astype(complex) @ shift_inv
                     for g in (schottky_generator(2.0, 1.0), schottky_generator(6.0, 1.0)))
        conj = GroupSpec(dim=3, generators=gens, family="schottky")
        base = GroupSpec(dim=3,
                         generators=(schottky_generator(2.0, 1.0).astype(complex),
                                     schottky_generator(6.0, 1.0).astype(complex)),
                         family="schottky")
        p = (0j, 2.0)
        p_shifted = (2.0j, 2.0)
        a = enumerate_orbit(base, p, p, 12.0)
        b = enumerate_orbit(conj, p_shifted, p_shifted, 12.0)
        assert len(a) == len(b)
        assert np.allclose(a.distances, b.distances, atol=1e-9)

    def test_free_family_without_disks_aborts(self):
        par_like = np.array([[1.5, 0.0], [0.0, 1.0 / 1.5]])  # no isometric circle data
        group = GroupSpec(dim=2, generators=(par_like,), family="free")
        with pytest.raises(EnumerationError):
            enumerate_orbit(group, (0.0, 1.0), (0.0, 1.0), 5.0)

    def test_free_family_with_disks_matches_schottky(self):
        free = GroupSpec(dim=2,
                         generators=(schottky_generator(2.0, 1.0), schottky_generator(6.0, 1.0)),
                         family="free")
        p = (0.0, 2.0)
        a = enumerate_orbit(free, p, p, 10.0)
        b = enumerate_orbit(schottky_pair(), p, p, 10.0)
        assert np.allclose(a.distances, b.distances)

    def test_node_budget_abort(self):
        group = schottky_pair()
        with pytest.raises(EnumerationError):
            enumerate_orbit(group, (0.0, 2.0), (0.0, 2.0), 60.0, node_budget=50)

    def test_csv_export(self, tmp_path):
        orbit = enumerate_orbit(axis_group(2.0), (0.0, 1.0), (0.0, 1.0), 6.0)
        path = tmp_path / "orbit.csv"
        orbit.to_csv(str(path))
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "distance,word_length"
        assert len(lines) == len(orbit) + 1


class TestCountingFunction:
    def test_cyclic_counting(self):
        orbit = enumerate_orbit(axis_group(2.0), (0.0, 1.0), (0.0, 1.0), 20.0)
        for radius in (0.0, 1.9, 2.0, 5.0, 10.0, 20.0):
            assert counting_function(orbit, radius) == 2 * math.floor(radius / 2.0) + 1

    def test_small_radius_nontrivial_basepoints(self):
        orbit = enumerate_orbit(axis_group(2.0), (0.0, 1.0), (0.0, math.e), 10.0)
        assert counting_function(orbit, 0.5) == 0

    def test_rejects_beyond_certified_range(self):
        orbit = enumerate_orbit(axis_group(2.0), (0.0, 1.0), (0.0, 1.0), 10.0)
        with pytest.raises(ValueError):
            counting_function(orbit, 11.0)

    def test_schottky_uniform_bracketing(self):
        group = schottky_pair()
        p = (0.0, 2.0)
        orbit = enumerate_orbit(group, p, p, 20.0)
        est = critical_exponent(orbit)
        delta = max(est.conservative, 1e-3)
        ks = np.arange(3.0, math.floor(orbit.r_max) + 1.0)
        counts = np.array([counting_function(orbit, k) for k in ks], dtype=float)
        c_hi = float(np.max(counts * np.exp(-delta * ks)))
        c_lo = float(np.min(counts * np.exp(-delta * ks)))
        assert 0.0 < c_lo <= c_hi < math.inf


class TestCriticalExponent:
    def test_cyclic_near_zero(self):
        orbit = enumerate_orbit(axis_group(2.0), (0.0, 1.0), (0.0, 1.0), 60.0)
        est = critical_exponent(orbit)
        assert not est.insufficient_data
        assert est.estimate < 0.05

    def test_trivial_zero(self):
        group = GroupSpec(dim=2, generators=(), family="trivial")
        orbit = enumerate_orbit(group, (0.0, 1.0), (0.0, 2.0), 5.0)
        est = critical_exponent(orbit)
        assert est.estimate == 0.0 and not est.insufficient_data

    def test_insufficient_data_flagged(self):
        orbit = enumerate_orbit(axis_group(2.0), (0.0, 1.0), (0.0, 1.0), 10.0)
        assert critical_exponent(orbit).insufficient_data


class TestPoincareSeries:
    def test_cyclic_closed_form_bracket(self):
        orbit = enumerate_orbit(axis_group(2.0), (0.0, 1.0), (0.0, 1.0), 40.0)
        ev = poincare_series(orbit, s=1.0, delta=0.05)
        lo, hi = ev.bracket
        assert lo <= COTH_1 <= hi
        assert hi - lo < 1e-10

    def test_trivial_group_exact(self):
        group = GroupSpec(dim=2, generators=(), family="trivial")
        orbit = enumerate_orbit(group, (0.0, 1.0), (0.0, math.e), 10.0)
        ev = poincare_series(orbit, s=0.7, delta=0.0)
        assert ev.tail_bound == 0.0
        assert ev.partial_sum == pytest.approx(math.exp(-0.7), rel=1e-14)

    def test_large_s_dominant_term(self):
        orbit = enumerate_orbit(axis_group(2.0), (0.0, 1.0), (0.0, math.exp(0.5)), 12.0)
        s = 40.0
        ev = poincare_series(orbit, s=s, delta=0.05)
        dominant = math.exp(-s * orbit.d_min)
        assert ev.partial_sum == pytest.approx(dominant, rel=1e-6)

    def test_rejects_s_at_or_below_delta(self):
        orbit = enumerate_orbit(axis_group(2.0), (0.0, 1.0), (0.0, 1.0), 10.0)
        with pytest.raises(ValueError):
            poincare_series(orbit, s=0.05, delta=0.05)

    def test_brackets_nested_under_doubling(self):
        group = axis_group(2.0)
        x = (0.0, 1.0)
        prev = None
        for r_max in (10.0, 20.0, 40.0):
            orbit = enumerate_orbit(group, x, x, r_max)
            lo, hi = poincare_series(orbit, s=1.0, delta=0.05).bracket
            if prev is not None:
                assert lo >= prev[0] - 1e-10
                assert hi <= prev[1] + 1e-10
            prev = (lo, hi)


class TestQuotientDistance:
    def test_min_orbit_distance_invariant_under_generator_permutation(self):
        g1 = schottky_generator(2.0, 1.0)
        g2 = schottky_generator(6.0, 1.0)
        x, y = (0.0, 2.0), (0.5, 1.5)
        a = enumerate_orbit(GroupSpec(dim=2, generators=(g1, g2), family="schottky"), x, y, 10.0)
        b = enumerate_orbit(GroupSpec(dim=2, generators=(g2, g1), family="schottky"), x, y, 10.0)
        assert a.d_min == pytest.approx(b.d_min, abs=1e-12)
        assert np.allclose(a.distances, b.distances)


class TestTheorem2Rhs:
    def test_boundary_triple_shape(self):
        # a1 = a3 = 0, a2 = rho_m: full time and Gaussian decay survive
        t, d = 2.0, 3.0
        triple = AlphaTriple(0.0, H3.rho_m, 0.0)
        val = float(theorem2_rhs(H3, 0.0, triple, 0, t, d, 0.1))
        expected = t ** -1.5 * math.exp(-0.9 * (t + H3.rho_m * d + d * d / (4 * t)))
        assert val == pytest.approx(expected, rel=1e-13)

    def test_rejects_inadmissible(self):
        with pytest.raises(ValueError):
            theorem2_rhs(H3, 0.0, AlphaTriple(0.1, 1.5, 0.1), 0, 1.0, 1.0, 0.1)

    @settings(max_examples=80, deadline=None)
    @given(st.floats(0.0, 1.0), st.floats(0.0, 1.0), st.floats(0.0, 1.0),
           st.floats(0.05, 20.0), st.floats(0.0, 15.0))
    def test_slack_nonnegative_on_admissible(self, a1, a3, frac, t, d):
        lo = H3.rho_m - H3.rho_norm * math.sqrt(a1 * a3)
        hi = H3.rho_m + H3.rho_norm * math.sqrt(a1 * a3)
        a2 = lo + frac * (hi - lo)
        a2 = min(max(a2, 1e-9), H3.rho_norm + H3.rho_m - 1e-9)
        triple = AlphaTriple(a1, a2, a3)
        assert float(splitting_slack(H3, triple, t, d)) >= -1e-10

    def test_slack_equality_case(self):
        triple = AlphaTriple(0.0, H3.rho_m, 0.0)
        assert float(splitting_slack(H3, triple, 1.3, 4.2)) == 0.0


class TestQuotientRegimes:
    def test_regime1_origin(self):
        t = 2.0
        val = float(quotient_regime_rhs(1, H3, 0.02, 0.5, t, 0.0))
        assert val == pytest.approx(t ** -1.5 * math.exp(-t), rel=1e-13)

    def test_regime2_vanishing_exponent(self):
        # when delta - rho_m + eps = rho_norm the time rate vanishes
        delta = H3.rho_m + 0.5
        eps = H3.rho_norm - 0.5
        t = 3.0
        val = float(quotient_regime_rhs(2, H3, delta, eps, t, 1.0))
        assert val == pytest.approx(t ** -1.5, rel=1e-13)

    def test_regime_range_rejections(self):
        with pytest.raises(ValueError):
            quotient_regime_rhs(1, H3, 1.5, 0.5, 1.0, 1.0)  # delta >= rho_m
        with pytest.raises(ValueError):
            quotient_regime_rhs(2, H3, 0.1, 0.5, 1.0, 1.0)  # delta < rho_m
        with pytest.raises(ValueError):
            quotient_regime_rhs(3, H3, 0.1, 0.5, 1.0, 1.0)

    def test_regime1_dominates_quotient_kernel(self):
        from heatlab import oracle

        group = axis_group(18.0, dim=3)
        x = (0j, 1.0)
        best = -math.inf
        for t in np.geomspace(0.2, 8.0, 8):
            for d in np.linspace(0.0, 6.0, 8):
                y = (0j, math.exp(float(d)))
                orbit = enumerate_orbit(group, x, y, 70.0)
                ev = oracle.quotient_kernel(orbit, "h3", float(t), None, None, 0, 70.0, delta=0.04)
                series = poincare_series(orbit, s=0.5, delta=0.04)
                rhs = float(quotient_regime_rhs(1, H3, 0.04, 0.5, t, d))
                best = max(best, math.log(ev.value) - math.log(rhs * series.partial_sum))
        assert math.isfinite(best)
        assert math.exp(best) < 10.0


class TestGroupConfig:
    def test_parse_plane_group(self):
        group = parse_group("[group]\ndim = 2\nfamily = cyclic\n"
                            "generator = 2.0, 0.0, 0.0, 0.5\n")
        assert group.dim == 2 and group.family == "cyclic"

    def test_parse_space_group(self):
        group = parse_group("[group]\ndim = 3\nfamily = cyclic\n"
                            "generator = 2,0, 0,0, 0,0, 0.5,0\n")
        assert group.dim == 3
        assert translation_length(group.generators[0]) == pytest.approx(2 * math.log(2.0))

    def test_parse_rejects_wrong_arity(self):
        with pytest.raises(ConfigError):
            parse_group("[group]\ndim = 2\nfamily = cyclic\ngenerator = 1,2,3\n")

    def test_parse_rejects_invalid_family(self):
        with pytest.raises(ConfigError):
            parse_group("[group]\ndim = 2\nfamily = cyclic\ngenerator = 1,1,0,1\n")
