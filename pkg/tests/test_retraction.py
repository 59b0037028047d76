"""Tests for pyhopflink.retraction."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pyhopflink.errors import DegenerateError, InputError, NotClosedError, NotInYError
from pyhopflink.quat import ONE, I, J, K, is_central_extension
from pyhopflink.retraction import (
    MIDPOINT,
    DeckElement,
    alpha_loop,
    alpha_s_loop,
    basepoint_frame,
    canonical_prism_point,
    center_arc_endpoints,
    config_of_frame,
    deck_matrix,
    deck_representative,
    deck_subgroup,
    endpoint_offset,
    equalize_radii,
    fiber_coordinates,
    frame_of,
    g_act,
    in_Y,
    loop_holonomy,
    motion_group,
    normalize_radius,
    orthogonalize,
    retract_to_Y,
    retraction_stages,
    s_loop,
)
from pyhopflink.roundlink import (
    OrientedRoundHopfLink,
    RigidMotion,
    RoundCircle,
    arc_of_intersection,
    basepoint_link,
    dihedral_angle,
    reverse_component,
)
from pyhopflink.sampling import random_link, random_rotation
from tests.fixtures import BASEPOINT

seeds = st.integers(min_value=0, max_value=2**32 - 1)

ROOT_HALF = 1.0 / math.sqrt(2.0)


def _assert_links_close(
    a: OrientedRoundHopfLink, b: OrientedRoundHopfLink, tol: float = 1e-9
) -> None:
    for ca, cb in zip(a.components, b.components):
        np.testing.assert_allclose(ca.p, cb.p, atol=tol)
        np.testing.assert_allclose(ca.n, cb.n, atol=tol)
        assert ca.radius == pytest.approx(cb.radius, abs=tol)


def _tilted(theta: float) -> OrientedRoundHopfLink:
    """Basepoint link with the second disc turned about the x-axis to dihedral angle *theta*."""
    return OrientedRoundHopfLink(
        RoundCircle((0.0, 0.0, 0.0), 1.0, (0.0, 0.0, 1.0)),
        RoundCircle((1.0, 0.0, 0.0), 1.0, (0.0, math.sin(theta), math.cos(theta))),
    )


def _assert_arcs_close(a: OrientedRoundHopfLink, b: OrientedRoundHopfLink) -> None:
    arc_a, arc_b = arc_of_intersection(a), arc_of_intersection(b)
    assert arc_b.first == pytest.approx(arc_a.first, abs=1e-12)
    assert arc_b.second == pytest.approx(arc_a.second, abs=1e-12)


# ---------------------------------------------------------------------------
# Deck group
# ---------------------------------------------------------------------------


class TestDeckGroup:
    def test_multiplication(self) -> None:
        assert DeckElement.ALPHA * DeckElement.S == DeckElement.ALPHA_S
        assert DeckElement.S * DeckElement.S == DeckElement.ID

    def test_alpha_reverses_both(self) -> None:
        out = g_act(DeckElement.ALPHA, BASEPOINT)
        assert out.first.normal == pytest.approx((0.0, 0.0, -1.0))
        assert out.second.normal == pytest.approx((0.0, -1.0, 0.0))
        assert out.linking_number == 1

    def test_s_swaps_labels(self) -> None:
        out = g_act(DeckElement.S, BASEPOINT)
        assert out.first == BASEPOINT.second
        assert out.second == BASEPOINT.first

    @pytest.mark.parametrize("g", list(DeckElement))
    def test_right_action_on_frames(self, g: DeckElement) -> None:
        rotation = random_rotation(np.random.default_rng(5))
        moved = g_act(g, config_of_frame(rotation))
        np.testing.assert_allclose(frame_of(moved), rotation @ deck_matrix(g), atol=1e-12)

    def test_lifted_deck_group(self) -> None:
        group = deck_subgroup()
        assert len(group) == 8
        assert group.contains(J)
        assert group.contains((I + K).scale(ROOT_HALF))
        assert group.contains((I - K).scale(ROOT_HALF))
        assert is_central_extension(group)


# ---------------------------------------------------------------------------
# Stages
# ---------------------------------------------------------------------------


class TestStages:
    def test_basepoint_is_fixed_by_every_stage(self) -> None:
        stages = retraction_stages(BASEPOINT)
        assert [name for name, _ in stages] == [
            "center_midpoint",
            "orthogonalize",
            "equalize_radii",
            "normalize_radius",
            "center_arc_endpoints",
        ]
        for _, link in stages:
            _assert_links_close(link, BASEPOINT)

    @settings(max_examples=25, deadline=None)
    @given(seed=seeds)
    def test_retraction_lands_in_y(self, seed: int) -> None:
        link = random_link(np.random.default_rng(seed))
        assert in_Y(retract_to_Y(link))

    @settings(max_examples=15, deadline=None)
    @given(seed=seeds)
    def test_retraction_fixes_y(self, seed: int) -> None:
        link = config_of_frame(random_rotation(np.random.default_rng(seed)))
        _assert_links_close(retract_to_Y(link), link)

    def test_stages_keep_linking_number(self) -> None:
        for _, link in retraction_stages(random_link(np.random.default_rng(11))):
            assert link.linking_number == 1

    def test_normalize_needs_equal_radii(self) -> None:
        link = OrientedRoundHopfLink(
            RoundCircle((0.0, 0.0, 0.0), 1.0, (0.0, 0.0, 1.0)),
            RoundCircle((1.0, 0.0, 0.0), 1.5, (0.0, 1.0, 0.0)),
        )
        with pytest.raises(DegenerateError, match="Radii must agree"):
            normalize_radius(link)

    def test_fiber_coordinates_of_basepoint(self) -> None:
        coords = fiber_coordinates(BASEPOINT)
        assert coords.translation == pytest.approx((0.0, 0.0, 0.0), abs=1e-12)
        assert coords.dihedral == pytest.approx(math.pi / 2)
        assert coords.radius_difference == pytest.approx(0.0)
        assert coords.common_radius == pytest.approx(1.0)
        assert coords.endpoint_offset == pytest.approx((0.0, 0.0, 0.0), abs=1e-12)
        assert len(coords.as_vector()) == 9
        np.testing.assert_allclose(coords.frame, basepoint_frame(), atol=1e-12)

    def test_fiber_translation_tracks_the_midpoint(self) -> None:
        moved = RigidMotion.translate([1.0, -2.0, 0.5]).apply_link(BASEPOINT)
        coords = fiber_coordinates(moved)
        assert coords.translation == pytest.approx((1.0, -2.0, 0.5))


# ---------------------------------------------------------------------------
# Individual stages
# ---------------------------------------------------------------------------


class TestStageExamples:
    @pytest.mark.parametrize("theta", [0.4, math.pi / 3, 2 * math.pi / 3, 2.0708, 2.9])
    def test_orthogonalize_reaches_right_angle(self, theta: float) -> None:
        link = _tilted(theta)
        assert dihedral_angle(link) == pytest.approx(theta)
        out = orthogonalize(link)
        assert dihedral_angle(out) == pytest.approx(math.pi / 2, abs=1e-10)
        _assert_arcs_close(link, out)
        assert out.first.radius == link.first.radius
        assert out.second.radius == link.second.radius
        assert out.linking_number == 1

    @pytest.mark.parametrize("theta", [math.pi / 3, 2 * math.pi / 3])
    def test_orthogonalize_commutes_with_alpha(self, theta: float) -> None:
        link = _tilted(theta)
        _assert_links_close(
            orthogonalize(g_act(DeckElement.ALPHA, link)),
            g_act(DeckElement.ALPHA, orthogonalize(link)),
            tol=1e-12,
        )

    @pytest.mark.parametrize("theta", [math.pi / 3, 2 * math.pi / 3])
    def test_orthogonalize_after_rigid_motion(self, theta: float) -> None:
        motion = RigidMotion(random_rotation(np.random.default_rng(3)), [0.3, -1.2, 2.0])
        out = orthogonalize(motion.apply_link(_tilted(theta)))
        assert dihedral_angle(out) == pytest.approx(math.pi / 2, abs=1e-10)
        assert out.linking_number == 1

    @pytest.mark.parametrize("theta", [math.pi / 3, 2.0708])
    def test_tilted_link_retracts_into_y(self, theta: float) -> None:
        final = retract_to_Y(_tilted(theta))
        assert in_Y(final)
        assert canonical_prism_point(_tilted(theta)).quaternion.norm() == pytest.approx(1.0)

    def test_equalize_half_radius(self) -> None:
        link = OrientedRoundHopfLink(
            RoundCircle((0.0, 0.0, 0.0), 1.0, (0.0, 0.0, 1.0)),
            RoundCircle((1.0, 0.0, 0.0), 0.5, (0.0, 1.0, 0.0)),
        )
        out = equalize_radii(link)
        assert (out.first.radius, out.second.radius) == pytest.approx((1.0, 1.0))
        assert out.first == link.first
        assert out.second.normal == link.second.normal
        _assert_arcs_close(link, out)
        _assert_links_close(
            equalize_radii(g_act(DeckElement.S, link)),
            g_act(DeckElement.S, out),
            tol=1e-12,
        )

    @pytest.mark.parametrize("a", [0.4, 1.0, 1.5])
    def test_center_arc_endpoints_coplanar_centers(self, a: float) -> None:
        link = OrientedRoundHopfLink(
            RoundCircle((0.0, 0.0, 0.0), 1.0, (0.0, 0.0, 1.0)),
            RoundCircle((a, 0.0, 0.0), 1.0, (0.0, 1.0, 0.0)),
        )
        np.testing.assert_allclose(endpoint_offset(link), [a - 1.0, 0.0, 0.0], atol=1e-12)

        out = center_arc_endpoints(link)
        _assert_links_close(out, BASEPOINT)
        assert float(np.linalg.norm(out.second.p - out.first.p)) == pytest.approx(1.0)

        # center displacements relative to the arc midpoint are γ₁/2 and γ₂/2
        m_in = np.array(arc_of_intersection(link).midpoint)
        m_out = np.array(arc_of_intersection(out).midpoint)
        gamma1 = 2.0 * ((out.first.p - m_out) - (link.first.p - m_in))
        gamma2 = 2.0 * ((out.second.p - m_out) - (link.second.p - m_in))
        np.testing.assert_allclose(gamma1, endpoint_offset(link), atol=1e-12)
        np.testing.assert_allclose(gamma1 + gamma2, np.zeros(3), atol=1e-12)


# ---------------------------------------------------------------------------
# Y and frames
# ---------------------------------------------------------------------------


class TestFrames:
    def test_basepoint_frame(self) -> None:
        expected = np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]])
        np.testing.assert_allclose(basepoint_frame(), expected, atol=1e-15)

    def test_config_of_basepoint_frame(self) -> None:
        _assert_links_close(config_of_frame(basepoint_frame()), BASEPOINT, tol=1e-15)

    @settings(max_examples=25, deadline=None)
    @given(seed=seeds)
    def test_frame_round_trip(self, seed: int) -> None:
        rotation = random_rotation(np.random.default_rng(seed))
        np.testing.assert_allclose(frame_of(config_of_frame(rotation)), rotation, atol=1e-12)

    def test_scaled_link_is_not_in_y(self) -> None:
        link = OrientedRoundHopfLink(
            RoundCircle((0.0, 0.0, 0.0), 2.0, (0.0, 0.0, 1.0)),
            RoundCircle((1.0, 0.0, 0.0), 2.0, (0.0, 1.0, 0.0)),
        )
        assert not in_Y(link)
        with pytest.raises(NotInYError, match="radius"):
            frame_of(link)

    def test_midpoint_is_checked(self) -> None:
        moved = RigidMotion.translate([0.0, 0.0, 1.0]).apply_link(BASEPOINT)
        with pytest.raises(NotInYError, match="midpoint"):
            frame_of(moved)
        assert np.allclose(MIDPOINT, [0.5, 0.0, 0.0])


# ---------------------------------------------------------------------------
# Canonical prism point
# ---------------------------------------------------------------------------


class TestCanonicalPrismPoint:
    def test_basepoint(self) -> None:
        point = canonical_prism_point(BASEPOINT)
        assert point.as_tuple() == pytest.approx((ROOT_HALF, 0.0, 0.0, ROOT_HALF), abs=1e-12)

    def test_negative_link_is_reoriented(self) -> None:
        negative = reverse_component(BASEPOINT, 1)
        assert canonical_prism_point(negative).quaternion.is_close(
            canonical_prism_point(BASEPOINT).quaternion, 1e-12
        )

    @settings(max_examples=20, deadline=None)
    @given(seed=seeds)
    def test_deck_images_give_identical_points(self, seed: int) -> None:
        link = random_link(np.random.default_rng(seed))
        base = canonical_prism_point(link)
        for g in DeckElement:
            assert canonical_prism_point(g_act(g, link)) == base
        assert canonical_prism_point(reverse_component(link, 1)) == base

    @settings(max_examples=20, deadline=None)
    @given(seed=seeds)
    def test_deck_representative_is_shared(self, seed: int) -> None:
        link = random_link(np.random.default_rng(seed))
        rep = deck_representative(link)
        assert rep in [g_act(g, link) for g in DeckElement]
        for g in DeckElement:
            assert deck_representative(g_act(g, link)) == rep

    @pytest.mark.parametrize("theta", [math.pi / 3, 2 * math.pi / 3])
    def test_tilted_deck_images_are_identical(self, theta: float) -> None:
        base = canonical_prism_point(_tilted(theta))
        for g in DeckElement:
            assert canonical_prism_point(g_act(g, _tilted(theta))) == base

    @settings(max_examples=20, deadline=None)
    @given(seed=seeds)
    def test_translation_invariance(self, seed: int) -> None:
        rng = np.random.default_rng(seed)
        link = random_link(rng)
        shifted = RigidMotion.translate(rng.uniform(-5.0, 5.0, size=3)).apply_link(link)
        assert canonical_prism_point(shifted).quaternion.is_close(
            canonical_prism_point(link).quaternion, 1e-8
        )


# ---------------------------------------------------------------------------
# Loops and holonomy
# ---------------------------------------------------------------------------


class TestHolonomy:
    def test_alpha_loop(self) -> None:
        loop = alpha_loop(200)
        assert len(loop) == 200
        assert loop_holonomy(loop).is_close(I, 1e-6)

    def test_s_loop(self) -> None:
        assert loop_holonomy(s_loop(200)).is_close((J + K).scale(ROOT_HALF), 1e-6)

    def test_alpha_s_loop(self) -> None:
        loop = alpha_s_loop(200)
        assert len(loop) == 399
        assert loop_holonomy(loop).is_close((J - K).scale(ROOT_HALF), 1e-6)

    def test_motion_group_is_q8(self) -> None:
        holonomies = [loop_holonomy(loop) for loop in (alpha_loop(200), s_loop(200))]
        group = motion_group(holonomies)
        assert len(group) == 8
        assert is_central_extension(group)

    def test_open_path_is_rejected(self) -> None:
        with pytest.raises(NotClosedError):
            loop_holonomy(alpha_loop(101)[:51])

    def test_empty_loop(self) -> None:
        assert loop_holonomy([]) == ONE

    def test_loop_needs_two_samples(self) -> None:
        with pytest.raises(InputError, match="at least 2"):
            alpha_loop(1)

    def test_loops_start_at_basepoint(self) -> None:
        for loop in (alpha_loop(10), s_loop(10), alpha_s_loop(10)):
            _assert_links_close(loop[0], basepoint_link())
