import numpy as np
import pytest
from scipy import stats
from scipy.constants import c, h

from src.fiber_channel.amplifier import EdfaConfig, ase_psd_mw_per_hz, edfa_amplify
from src.fiber_channel.dispersion import FiberConfig, apply_cd, attenuate, propagate
from src.fiber_channel.jones import (
    JonesMatrix,
    pol_transform,
    random_sop_rotation,
    unitary_from_angles,
)
from src.signal_core.waveforms import DualPolWaveform
from src.utils.errors import DisabledAmplifierError

FS = 100e9


@pytest.fixture
def random_field(rng):
    n = 4096
    x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    y = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return DualPolWaveform.from_arrays(x, y, FS)


def test_beta2_value():
    # -D lambda^2 / (2 pi c) for 17 ps/(nm km) at 1550 nm
    assert FiberConfig().beta2 == pytest.approx(-2.1683e-26, rel=1e-3)


def test_cd_is_all_pass(random_field):
    out = apply_cd(random_field, FiberConfig(length_km=80))
    for before, after in ((random_field.x, out.x), (random_field.y, out.y)):
        e_in = np.sum(np.abs(before.samples) ** 2)
        e_out = np.sum(np.abs(after.samples) ** 2)
        assert abs(e_out - e_in) / e_in < 1e-12


def test_cd_inverse_recovers_input(random_field):
    forward = apply_cd(random_field, FiberConfig(length_km=80))
    back = apply_cd(forward, FiberConfig(length_km=80, dispersion_ps_nm_km=-17.0))
    rms = np.sqrt(np.mean(np.abs(back.x.samples - random_field.x.samples) ** 2))
    assert rms < 1e-9


def test_cd_zero_length_is_identity(random_field):
    assert apply_cd(random_field, FiberConfig(length_km=0)) is random_field


def test_cd_two_tone_group_delay():
    n = 2 ** 14
    t = (np.arange(n) - n / 2) / FS
    envelope = np.exp(-t ** 2 / (2 * (100e-12) ** 2))
    upper = envelope * np.exp(2j * np.pi * 5e9 * t)
    lower = envelope * np.exp(-2j * np.pi * 5e9 * t)
    out = apply_cd(DualPolWaveform.from_arrays(upper, lower, FS), FiberConfig(length_km=80))

    def centroid(samples):
        p = np.abs(samples) ** 2
        return np.sum(t * p) / np.sum(p)

    t_upper, t_lower = centroid(out.x.samples), centroid(out.y.samples)
    expected = 17e-6 * 80e3 * (1550e-9) ** 2 * 10e9 / c
    assert expected == pytest.approx(108.9e-12, rel=1e-3)
    assert abs(t_lower - t_upper - expected) < 1 / FS
    # anomalous dispersion: the higher frequency arrives first
    assert t_upper < t_lower


def test_attenuation(random_field):
    out = attenuate(random_field, FiberConfig(length_km=80))
    ratio = out.mean_power / random_field.mean_power
    assert ratio == pytest.approx(10 ** (-1.6), rel=1e-12)


def test_propagate_combines_loss_and_cd(random_field):
    cfg = FiberConfig(length_km=20)
    out = propagate(random_field, cfg)
    expected = attenuate(apply_cd(random_field, cfg), cfg)
    np.testing.assert_allclose(out.x.samples, expected.x.samples)


def test_fiber_config_validation():
    with pytest.raises(ValueError):
        FiberConfig(length_km=-1)


def test_edfa_disabled():
    field = DualPolWaveform.from_arrays(np.ones(8), np.ones(8), FS)
    with pytest.raises(DisabledAmplifierError):
        edfa_amplify(field, EdfaConfig(enabled=False), seed=0)


def test_ase_psd_formula():
    cfg = EdfaConfig(enabled=True, gain_db=16, noise_figure_db=5)
    g = 10 ** 1.6
    expected = (g - 1) * (10 ** 0.5 / 2) * h * c / 1550e-9 * 1e3
    assert ase_psd_mw_per_hz(cfg) == pytest.approx(expected, rel=1e-12)


def test_edfa_noise_power_and_gain():
    n = 100_000
    cfg = EdfaConfig(enabled=True, gain_db=16, noise_figure_db=5)
    dark = DualPolWaveform.from_arrays(np.zeros(n), np.zeros(n), FS)
    noise = edfa_amplify(dark, cfg, seed=4)
    expected = ase_psd_mw_per_hz(cfg) * FS
    assert np.mean(np.abs(noise.x.samples) ** 2) == pytest.approx(expected, rel=0.03)
    assert np.mean(np.abs(noise.y.samples) ** 2) == pytest.approx(expected, rel=0.03)

    lit = DualPolWaveform.from_arrays(np.ones(n), np.zeros(n), FS)
    amplified = edfa_amplify(lit, cfg, seed=4)
    gain_field = amplified.x.samples - noise.x.samples
    np.testing.assert_allclose(gain_field, np.sqrt(10 ** 1.6), rtol=1e-9)


def test_sop_rotation_is_unitary_and_seeded():
    a = random_sop_rotation(42)
    b = random_sop_rotation(42)
    assert a.is_unitary(atol=1e-12)
    assert np.array_equal(a.matrix, b.matrix)
    assert not np.allclose(a.matrix, random_sop_rotation(43).matrix)


def test_sop_rotation_haar_marginal():
    # for Haar-random SU(2), |J00|^2 is uniform on [0, 1]
    values = [abs(random_sop_rotation(seed).matrix[0, 0]) ** 2 for seed in range(2000)]
    assert stats.kstest(values, "uniform").pvalue > 1e-3


def test_unitary_from_angles():
    assert unitary_from_angles(0.0, 0.0, 0.0).is_unitary()
    np.testing.assert_allclose(unitary_from_angles(0.0, 0.0, 0.0).matrix, np.eye(2))
    swap = unitary_from_angles(np.pi / 2, 0.0, 0.0).matrix
    np.testing.assert_allclose(np.abs(swap), [[0, 1], [1, 0]], atol=1e-15)


def test_pol_transform_round_trip(random_field):
    jones = random_sop_rotation(9)
    back = pol_transform(pol_transform(random_field, jones), jones.dagger)
    np.testing.assert_allclose(back.x.samples, random_field.x.samples, atol=1e-12)
    np.testing.assert_allclose(back.y.samples, random_field.y.samples, atol=1e-12)
    total_in = random_field.total_power
    total_out = pol_transform(random_field, jones).total_power
    np.testing.assert_allclose(total_out, total_in, rtol=1e-12)


def test_jones_matrix_shape():
    with pytest.raises(ValueError):
        JonesMatrix(np.eye(3))


@pytest.mark.parametrize("seed", [3, 17, 42])
def test_cd_commutes_with_pol_transform(random_field, seed):
    fiber = FiberConfig(length_km=50)
    jones = random_sop_rotation(seed)
    cd_first = pol_transform(apply_cd(random_field, fiber), jones)
    rotate_first = apply_cd(pol_transform(random_field, jones), fiber)
    np.testing.assert_allclose(cd_first.x.samples, rotate_first.x.samples, rtol=0, atol=1e-12)
    np.testing.assert_allclose(cd_first.y.samples, rotate_first.y.samples, rtol=0, atol=1e-12)


def test_edfa_unity_gain_is_identity(random_field):
    out = edfa_amplify(random_field, EdfaConfig(enabled=True, gain_db=0.0), seed=5)
    np.testing.assert_array_equal(out.x.samples, random_field.x.samples)
    np.testing.assert_array_equal(out.y.samples, random_field.y.samples)


def test_edfa_restores_span_loss(random_field):
    fiber = FiberConfig(length_km=80)
    edfa = EdfaConfig(enabled=True, gain_db=fiber.loss_db, noise_figure_db=5.0)
    restored = edfa_amplify(attenuate(random_field, fiber), edfa, seed=9)
    for before, after in ((random_field.x, restored.x), (random_field.y, restored.y)):
        assert after.mean_power == pytest.approx(before.mean_power, rel=0.01)
