"""Uniform grids, trapezoid quadrature and the Fourier transform contract.

Transform convention used throughout the package::

    forward   g(k) = integral d^3x f(x) exp(-i k.x)
    inverse   f(x) = (2 pi)^-3 integral d^3k g(k) exp(+i k.x)

Both are realized as shifted DFTs on grids with ``dk * dx * N == 2 pi``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

_TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class AxisSpec:
    """One uniform axis with ``count`` nodes from ``min`` to ``max`` inclusive.

    A periodic axis is integrated with equal weights (the trapezoid rule on a
    periodic function); a non-periodic one gets half weights at both ends.
    """

    min: float
    max: float
    count: int
    periodic: bool = False

    def __post_init__(self):
        if int(self.count) != self.count or self.count < 2:
            raise ValueError(f"count must be an integer >= 2, got {self.count}")
        if not (np.isfinite(self.min) and np.isfinite(self.max)):
            raise ValueError("axis bounds must be finite")
        if self.max <= self.min:
            raise ValueError(f"spacing must be positive (min={self.min}, max={self.max})")

    @property
    def spacing(self) -> float:
        return (self.max - self.min) / (self.count - 1)

    def nodes(self) -> np.ndarray:
        return self.min + self.spacing * np.arange(self.count)

    def weights(self) -> np.ndarray:
        w = np.full(self.count, self.spacing)
        if not self.periodic:
            w[0] *= 0.5
            w[-1] *= 0.5
        return w

    @classmethod
    def from_spacing(cls, start: float, spacing: float, count: int, periodic=True):
        return cls(float(start), float(start + spacing * (count - 1)), int(count), periodic)


@dataclass(frozen=True)
class SampledField:
    """Complex samples on a tensor-product grid, shape ``(*counts, components)``."""

    axes: tuple
    components: int
    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        axes = tuple(self.axes)
        object.__setattr__(self, "axes", axes)
        data = np.asarray(self.data, dtype=complex)
        shape = tuple(a.count for a in axes) + (int(self.components),)
        if data.size != int(np.prod(shape)):
            raise ValueError(
                f"data has {data.size} entries, expected {int(np.prod(shape))} for shape {shape}"
            )
        object.__setattr__(self, "data", data.reshape(shape))

    @property
    def shape(self):
        return tuple(a.count for a in self.axes)

    def mesh(self):
        return np.meshgrid(*[a.nodes() for a in self.axes], indexing="ij")


def integrate(f: SampledField, weight=None):
    """Trapezoid quadrature of every component, optionally times a nodewise weight.

    Returns a complex scalar for single-component fields and an array of
    length ``components`` otherwise.
    """
    data = f.data
    if np.isnan(data).any():
        raise ValueError("field contains NaN")
    if weight is not None:
        weight = np.asarray(weight)
        if weight.shape != f.shape:
            raise ValueError(f"weight shape {weight.shape} does not match grid {f.shape}")
        if not np.all(np.isfinite(weight)):
            raise ValueError("weight must be finite on all nodes")
        data = data * weight[..., None]
    out = data
    for ax in f.axes:
        out = np.tensordot(ax.weights(), out, axes=(0, 0))
    return complex(out[0]) if f.components == 1 else out


def _check_conjugate(x_ax: AxisSpec, k_ax: AxisSpec):
    if x_ax.count != k_ax.count:
        raise ValueError(f"axis counts differ: {x_ax.count} vs {k_ax.count}")
    prod = x_ax.spacing * k_ax.spacing * x_ax.count
    if abs(prod - _TWO_PI) > 1e-9 * _TWO_PI:
        raise ValueError(f"axes are not Fourier conjugate: dx*dk*N = {prod}, expected 2*pi")


def conjugate_axis(axis: AxisSpec, start: float) -> AxisSpec:
    """The axis with spacing ``2 pi / (N d)`` starting at ``start``."""
    return AxisSpec.from_spacing(start, _TWO_PI / (axis.count * axis.spacing), axis.count)


def dft_axis(data, axis: int, x0, dx, k0, dk, inverse=False):
    """Shifted DFT along one array axis.

    Forward evaluates ``sum_n dx f_n exp(-i k_j x_n)``; inverse evaluates
    ``(dk / 2 pi) sum_j g_j exp(+i k_j x_n)``.
    """
    data = np.asarray(data, dtype=complex)
    n = data.shape[axis]
    idx = np.arange(n)
    shape = [1] * data.ndim
    shape[axis] = n
    if not inverse:
        pre = np.exp(-1j * k0 * dx * idx).reshape(shape)
        post = (dx * np.exp(-1j * k0 * x0) * np.exp(-1j * dk * x0 * idx)).reshape(shape)
        return np.fft.fft(data * pre, axis=axis) * post
    pre = np.exp(1j * dk * x0 * idx).reshape(shape)
    post = (dk / _TWO_PI * n * np.exp(1j * k0 * x0) * np.exp(1j * k0 * dx * idx)).reshape(shape)
    return np.fft.ifft(data * pre, axis=axis) * post


def fourier_forward(f: SampledField, k_axes: Sequence[AxisSpec]) -> SampledField:
    """``g(k) = integral f(x) exp(-i k.x) dx`` on the given conjugate axes."""
    k_axes = tuple(k_axes)
    if len(k_axes) != len(f.axes):
        raise ValueError("number of k axes must match the field dimension")
    out = f.data
    for i, (xa, ka) in enumerate(zip(f.axes, k_axes)):
        _check_conjugate(xa, ka)
        out = dft_axis(out, i, xa.min, xa.spacing, ka.min, ka.spacing)
    return SampledField(k_axes, f.components, out)


def fourier_inverse(g: SampledField, x_axes: Sequence[AxisSpec]) -> SampledField:
    """``f(x) = (2 pi)^-d integral g(k) exp(+i k.x) dk`` on the given axes."""
    x_axes = tuple(x_axes)
    if len(x_axes) != len(g.axes):
        raise ValueError("number of x axes must match the field dimension")
    out = g.data
    for i, (xa, ka) in enumerate(zip(x_axes, g.axes)):
        _check_conjugate(xa, ka)
        out = dft_axis(out, i, xa.min, xa.spacing, ka.min, ka.spacing, inverse=True)
    return SampledField(x_axes, g.components, out)
