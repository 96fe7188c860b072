import numpy as np
import pytest

from irscov.geometry import IrsPanel, boresight_angles, vec3, vertical_frame_angles


def reference_positions(panel):
    """Brute-force element placement straight from the index map."""
    out = []
    for m_y in range(1 - panel.m_y // 2, panel.m_y // 2 + 1):
        for m_z in range(1 - panel.m_z // 2, panel.m_z // 2 + 1):
            n = (m_y + panel.m_y // 2 - 1) * panel.m_z + (m_z + panel.m_z // 2)
            out.append((n, panel.center
                        + (m_y - 0.5) * panel.d_y * panel.in_plane_horizontal
                        + (m_z - 0.5) * panel.d_z * np.array([0.0, 0.0, 1.0])))
    out.sort(key=lambda t: t[0])
    assert [n for n, _ in out] == list(range(1, panel.n_elements + 1))
    return np.array([p for _, p in out])


def test_element_position_10x10():
    panel = IrsPanel(10, 10, 0.075, 0.075, height=25.0)
    # (m_y, m_z) = (1, 1) flattens to n = (1+5-1)*10 + (1+5) = 56
    assert panel.grid_indices(56) == (1, 1)
    np.testing.assert_allclose(panel.element_position(56),
                               [0.0, 0.0375, 25.0375], atol=1e-12)


def test_first_index_maps_to_lower_corner():
    panel = IrsPanel(8, 6, 0.05, 0.05, height=10.0)
    assert panel.grid_indices(1) == (1 - 4, 1 - 3)


def test_positions_match_bruteforce_and_symmetry():
    panel = IrsPanel(2, 2, 0.075, 0.075, height=25.0)
    pos = panel.element_positions()
    np.testing.assert_allclose(pos, reference_positions(panel), atol=1e-12)
    # four positions symmetric about the panel center
    np.testing.assert_allclose(pos.mean(axis=0), panel.center, atol=1e-12)
    np.testing.assert_allclose(sorted(np.abs(pos[:, 1])), [0.0375] * 4)

    big = IrsPanel(10, 4, 0.07, 0.03, height=30.0, center_xy=(5.0, -2.0),
                   boresight_azimuth=2.0 * np.pi / 3.0)
    np.testing.assert_allclose(big.element_positions(), reference_positions(big),
                               atol=1e-12)


def test_element_index_bounds():
    panel = IrsPanel(4, 4, 0.075, 0.075, height=25.0)
    with pytest.raises(IndexError):
        panel.element_position(0)
    with pytest.raises(IndexError):
        panel.element_position(17)


def test_odd_counts_rejected():
    with pytest.raises(ValueError):
        IrsPanel(9, 10, 0.075, 0.075, height=25.0)


def test_boresight_angles_on_axis():
    origin = vec3(0.0, 0.0, 25.0)
    ue = vec3(120.0, 0.0, 25.0)
    ang = boresight_angles(origin, vec3(1.0, 0.0, 0.0), ue)
    assert ang.theta == pytest.approx(0.0, abs=1e-12)


def test_boresight_angles_behind_panel():
    origin = vec3(0.0, 0.0, 25.0)
    ang = boresight_angles(origin, vec3(1.0, 0.0, 0.0), vec3(-50.0, 3.0, 20.0))
    assert ang.theta > np.pi / 2.0


def test_boresight_angles_match_closed_form():
    # theta = arccos(x/d), phi measured from the in-plane horizontal axis
    origin = vec3(0.0, 0.0, 25.0)
    ue = vec3(60.0, 30.0, 45.0)
    d = np.linalg.norm(ue - origin)
    ang = boresight_angles(origin, vec3(1.0, 0.0, 0.0), ue)
    assert ang.theta == pytest.approx(np.arccos(60.0 / d), abs=1e-12)
    assert ang.phi == pytest.approx(np.arctan2(45.0 - 25.0, 30.0), abs=1e-12)


def test_boresight_angles_below_horizon_negative_phi():
    origin = vec3(0.0, 0.0, 25.0)
    ang = boresight_angles(origin, vec3(1.0, 0.0, 0.0), vec3(40.0, 0.0, 1.5))
    assert ang.phi < 0.0


def test_vertical_frame_boresight_at_equator():
    tx = vec3(0.559, 0.0, 25.0)
    ang = vertical_frame_angles(tx, vec3(-1.0, 0.0, 0.0), vec3(0.0, 0.0, 25.0))
    assert ang.theta == pytest.approx(np.pi / 2.0, abs=1e-12)
    assert ang.phi == pytest.approx(0.0, abs=1e-12)


def test_vertical_frame_rotated_sector():
    # sector pointing along +y: a target on that axis is on boresight
    site = vec3(0.0, 0.0, 25.0)
    ang = vertical_frame_angles(site, vec3(0.0, 1.0, 0.0), vec3(0.0, 80.0, 25.0))
    assert ang.theta == pytest.approx(np.pi / 2.0, abs=1e-12)
    assert ang.phi == pytest.approx(0.0, abs=1e-12)


def test_degenerate_inputs_raise():
    with pytest.raises(ValueError):
        boresight_angles(vec3(0, 0, 0), vec3(0, 0, 0), vec3(1, 0, 0))
    with pytest.raises(ValueError):
        boresight_angles(vec3(0, 0, 1), vec3(1, 0, 0), vec3(0, 0, 1))
    with pytest.raises(ValueError):
        vertical_frame_angles(vec3(0, 0, 0), vec3(0, 0, 1), vec3(1, 0, 0))
