"""Central finite differences with Richardson extrapolation.

All routines accept functions returning scalars or arrays of any fixed shape;
derivative axes are appended last, so ``gradient(f, x)`` has shape
``f(x).shape + (n,)`` and ``hessian(f, x)`` has shape ``f(x).shape + (n, n)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = ["DiffConfig", "gradient", "hessian", "richardson_extrapolate"]

EPS = np.finfo(float).eps

# centred stencils as (offset, weight) pairs for offsets k > 0; terms are
# combined as f(x+kh) - f(x-kh) (first) or f(x+kh) + f(x-kh) - 2 f(x) (second),
# so constants are differentiated to exactly zero
_FIRST = {
    2: ((1, 1 / 2),),
    4: ((1, 8 / 12), (2, -1 / 12)),
    6: ((1, 3 / 4), (2, -3 / 20), (3, 1 / 60)),
}
_SECOND = {
    2: ((1, 1.0),),
    4: ((1, 16 / 12), (2, -1 / 12)),
    6: ((1, 3 / 2), (2, -3 / 20), (3, 1 / 90)),
}


@dataclass(frozen=True)
class DiffConfig:
    """Finite-difference settings.

    Parameters
    ----------
    base_step : float or None
        Step for first derivatives before per-coordinate scaling by
        ``max(1, |x_i|)``. ``None`` selects the roundoff/truncation balance
        ``eps ** (1 / (stencil_order + k))`` for a k-th derivative.
    richardson_levels : int
        Number of successively halved steps combined by extrapolation;
        1 disables extrapolation.
    stencil_order : int
        Formal accuracy order of the central stencil (2, 4 or 6).
    """

    base_step: float | None = None
    richardson_levels: int = 2
    stencil_order: int = 4

    def __post_init__(self):
        if self.base_step is not None and not self.base_step > 0:
            raise ValueError(f"base_step must be positive, got {self.base_step}")
        if self.stencil_order not in _FIRST:
            raise ValueError(f"stencil_order must be 2, 4 or 6, got {self.stencil_order}")
        if self.richardson_levels < 1:
            raise ValueError("richardson_levels must be >= 1")

    def step(self, x: np.ndarray, derivative_order: int = 1, scale: float = 1.0) -> np.ndarray:
        """Per-coordinate step vector for a derivative of the given order."""
        if self.base_step is None:
            h = EPS ** (1.0 / (self.stencil_order + derivative_order))
        else:
            h = self.base_step
        return scale * h * np.maximum(1.0, np.abs(x))

    def to_dict(self) -> dict:
        return {
            "base_step": self.base_step,
            "richardson_levels": self.richardson_levels,
            "stencil_order": self.stencil_order,
        }


def richardson_extrapolate(values, p: int, r: float = 2.0):
    """Combine estimates at steps h, h/r, h/r**2, ... with even error powers.

    ``p`` is the leading error order; each elimination raises it by two,
    which holds for centred stencils.
    """
    vals = [np.asarray(v, dtype=float) for v in values]
    order = p
    while len(vals) > 1:
        factor = r**order
        vals = [(factor * b - a) / (factor - 1.0) for a, b in zip(vals[:-1], vals[1:])]
        order += 2
    return vals[0]


def _eval(f: Callable, x: np.ndarray) -> np.ndarray:
    return np.asarray(f(x), dtype=float)


def _shift(x: np.ndarray, c: int, dx: float) -> np.ndarray:
    xs = x.copy()
    xs[c] += dx
    return xs


def gradient(f: Callable, x, cfg: DiffConfig | None = None, step_scale: float = 1.0) -> np.ndarray:
    """First partial derivatives of ``f`` at ``x``, stacked on the last axis."""
    cfg = cfg or DiffConfig()
    x = np.asarray(x, dtype=float)
    n = x.size
    stencil = _FIRST[cfg.stencil_order]
    h0 = cfg.step(x, 1, step_scale)
    cols = []
    for c in range(n):
        estimates = []
        for level in range(cfg.richardson_levels):
            h = h0[c] / 2**level
            acc = 0.0
            for k, w in stencil:
                acc = acc + w * (_eval(f, _shift(x, c, k * h)) - _eval(f, _shift(x, c, -k * h)))
            estimates.append(acc / h)
        cols.append(richardson_extrapolate(estimates, cfg.stencil_order))
    return np.stack(cols, axis=-1)


def hessian(f: Callable, x, cfg: DiffConfig | None = None, step_scale: float = 1.0) -> np.ndarray:
    """Second partial derivatives of ``f`` at ``x`` on the last two axes.

    Diagonal entries use the one-dimensional second-derivative stencil, mixed
    entries the tensor product of first-derivative stencils; the result is
    symmetric by construction.
    """
    cfg = cfg or DiffConfig()
    x = np.asarray(x, dtype=float)
    n = x.size
    f0 = _eval(f, x)
    h0 = cfg.step(x, 2, step_scale)
    first, second = _FIRST[cfg.stencil_order], _SECOND[cfg.stencil_order]
    out = np.zeros(f0.shape + (n, n))
    for c in range(n):
        estimates = []
        for level in range(cfg.richardson_levels):
            h = h0[c] / 2**level
            acc = 0.0
            for k, w in second:
                acc = acc + w * (_eval(f, _shift(x, c, k * h)) + _eval(f, _shift(x, c, -k * h)) - 2.0 * f0)
            estimates.append(acc / h**2)
        out[..., c, c] = richardson_extrapolate(estimates, cfg.stencil_order)
        for d in range(c + 1, n):
            estimates = []
            for level in range(cfg.richardson_levels):
                hc = h0[c] / 2**level
                hd = h0[d] / 2**level
                acc = 0.0
                for j, wj in first:
                    for k, wk in first:
                        cross = 0.0
                        for sj, sk, sign in ((1, 1, 1.0), (1, -1, -1.0), (-1, 1, -1.0), (-1, -1, 1.0)):
                            xs = _shift(x, c, sj * j * hc)
                            xs[d] += sk * k * hd
                            cross = cross + sign * _eval(f, xs)
                        acc = acc + wj * wk * cross
                estimates.append(acc / (hc * hd))
            val = richardson_extrapolate(estimates, cfg.stencil_order)
            out[..., c, d] = val
            out[..., d, c] = val
    return out
