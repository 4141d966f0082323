"""Espectro de una ventana y sus características de frecuencia.

Canales (por armónico k):
    0. amplitud  A = √(Re² + Im²)
    1. fase      φ = atan2(Re, Im)   (orden arctan(Re/Im), 0 si Re = Im = 0)
    2. potencia  P = Re² + Im²
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Spectrum:
    """Partes real e imaginaria de X[k], k ∈ [0, L)."""
    real: np.ndarray
    imag: np.ndarray

    def __len__(self) -> int:
        return len(self.real)

    def __getitem__(self, k: int):
        return float(self.real[k]), float(self.imag[k])


def dft(window: np.ndarray) -> Spectrum:
    """DFT exacta X[k] = Σ x_n e^{−2πikn/L} (vía FFT)."""
    x = np.asarray(window, dtype=np.float64).ravel()
    spectrum = np.fft.fft(x)
    return Spectrum(real=spectrum.real.copy(), imag=spectrum.imag.copy())


def freq_features(s: Spectrum) -> np.ndarray:
    """Matriz L×3 con amplitud, fase y potencia."""
    re, im = s.real, s.imag
    power = re * re + im * im
    amplitude = np.sqrt(power)
    # np.arctan2(0, 0) == 0, que es la convención buscada
    phase = np.arctan2(re, im)
    return np.stack([amplitude, phase, power], axis=1)
