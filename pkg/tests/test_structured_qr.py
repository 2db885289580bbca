import numpy as np
import pytest

from conftest import random_factors
from mimo3d import channel, stbc
from mimo3d.structured_qr import (SingularChannelError, classical_gram_schmidt,
                                  gram_schmidt_qr, qr_r23, verify_structure)


def test_identity_like_input():
    a = 2.0 * np.eye(16)
    f = gram_schmidt_qr(a)
    np.testing.assert_allclose(f.q, np.eye(16), atol=1e-14)
    np.testing.assert_allclose(f.r, a, atol=1e-14)


def test_reconstruction_and_orthonormality():
    rng = np.random.default_rng(0)
    for _ in range(20):
        f = random_factors(rng, stbc.generator_matrix())
        assert np.abs(f.q @ f.r - f.heq).max() < 1e-12
        assert np.abs(f.q.T @ f.q - np.eye(16)).max() < 1e-12
        assert np.all(np.diag(f.r) > 0)
        assert np.abs(np.tril(f.r, -1)).max() < 1e-12


def test_matches_classical_gram_schmidt():
    rng = np.random.default_rng(1)
    g = stbc.generator_matrix()
    for _ in range(20):
        heq = channel.equivalent_channel(channel.draw_channel(rng), g)
        f = gram_schmidt_qr(heq)
        q_ref, r_ref = classical_gram_schmidt(heq)
        scale = np.linalg.norm(heq)
        assert np.abs(f.r - r_ref).max() < 1e-10 * scale
        assert np.abs(f.q - q_ref).max() < 1e-9


def test_block_indexing():
    rng = np.random.default_rng(2)
    f = random_factors(rng, stbc.generator_matrix())
    np.testing.assert_array_equal(f.block(1, 1), f.r[:4, :4])
    np.testing.assert_array_equal(f.block(2, 3), f.r[4:8, 8:12])
    np.testing.assert_array_equal(f.block(4, 4), f.r[12:, 12:])


def test_structure_theorems_hold():
    rng = np.random.default_rng(3)
    for _ in range(100):
        f = random_factors(rng, stbc.generator_matrix())
        report = verify_structure(f)
        assert report.ok(1e-9), report.violations(1e-9)
        assert report.norm_identity_rel < 1e-9


def test_structure_detector_flags_perturbation():
    rng = np.random.default_rng(4)
    f = random_factors(rng, stbc.generator_matrix())
    r = f.r.copy()
    r[0, 1] += 1e-3 * np.linalg.norm(r)  # R11 entry (1,2) must vanish
    broken = type(f)(heq=f.heq, q=f.q, r=r)
    report = verify_structure(broken, qr_r23(broken.block(2, 3)))
    names = [n for n, _ in report.violations(1e-9)]
    assert "R11[1,2]" in names


def test_qr_r23_properties():
    rng = np.random.default_rng(5)
    for _ in range(50):
        f = random_factors(rng, stbc.generator_matrix())
        r23 = f.block(2, 3)
        out = qr_r23(r23)
        assert not out.degenerate
        assert np.abs(out.e @ out.f - r23).max() < 1e-12
        assert np.abs(out.e.T @ out.e - np.eye(4)).max() < 1e-12
        assert np.abs(np.tril(out.f, -1)).max() < 1e-12
        assert np.all(np.diag(out.f) >= 0)


def test_qr_r23_degenerate_flag():
    out = qr_r23(np.zeros((4, 4)))
    assert out.degenerate
    np.testing.assert_allclose(out.f, np.zeros((4, 4)))


def test_singular_channel_raises():
    g = stbc.generator_matrix()
    h = np.zeros((2, 4), dtype=complex)
    h[0] = [1, 2, 3, 4]
    h[1] = h[0]  # duplicate rows: rank-deficient equivalent channel
    with pytest.raises(SingularChannelError):
        gram_schmidt_qr(channel.equivalent_channel(h, g))


def test_report_max_violation_small():
    rng = np.random.default_rng(6)
    f = random_factors(rng, stbc.generator_matrix())
    report = verify_structure(f)
    assert report.max_violation() < 1e-9 * report.r_norm
