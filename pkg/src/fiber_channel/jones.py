"""Jones-calculus polarization transforms."""
from dataclasses import dataclass

import numpy as np

from src.signal_core.waveforms import DualPolWaveform


@dataclass(frozen=True, eq=False)
class JonesMatrix:
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex, copy=True)
        if m.shape != (2, 2):
            raise ValueError(f"Jones matrix must be 2x2, got shape {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def identity(cls) -> "JonesMatrix":
        return cls(np.eye(2))

    def __matmul__(self, other: "JonesMatrix") -> "JonesMatrix":
        return JonesMatrix(self.matrix @ other.matrix)

    @property
    def dagger(self) -> "JonesMatrix":
        return JonesMatrix(self.matrix.conj().T)

    def is_unitary(self, atol: float = 1e-12) -> bool:
        return bool(np.allclose(self.matrix @ self.matrix.conj().T, np.eye(2), rtol=0, atol=atol))


def su2_matrix(theta: float, phi: float, psi: float) -> np.ndarray:
    """SU(2) element [[cos t e^{j phi}, -sin t e^{-j psi}], [sin t e^{j psi}, cos t e^{-j phi}]]."""
    ct, st = np.cos(theta), np.sin(theta)
    return np.array(
        [
            [ct * np.exp(1j * phi), -st * np.exp(-1j * psi)],
            [st * np.exp(1j * psi), ct * np.exp(-1j * phi)],
        ]
    )


def unitary_from_angles(theta: float, phi: float, psi: float) -> JonesMatrix:
    return JonesMatrix(su2_matrix(theta, phi, psi))


def random_sop_rotation(seed) -> JonesMatrix:
    """Haar-distributed rotation: cos^2(theta) uniform on [0, 1], phases uniform."""
    rng = np.random.default_rng(seed)
    u, phi, psi = rng.random(3)
    theta = np.arccos(np.sqrt(u))
    return unitary_from_angles(theta, 2 * np.pi * phi, 2 * np.pi * psi)


def pol_transform(field: DualPolWaveform, jones: JonesMatrix) -> DualPolWaveform:
    """(x', y')^T = J (x, y)^T at every sample."""
    (a, b), (c, d) = jones.matrix
    x, y = field.x.samples, field.y.samples
    return DualPolWaveform.from_arrays(a * x + b * y, c * x + d * y, field.sample_rate)
