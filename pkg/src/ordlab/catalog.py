"""Built-in metrics addressable by string labels.

``euclidean:n``            identity metric
``spherical3``             flat R^3 in (r, theta, phi)
``conf-gauss:n:s``         phi^2 delta with phi = exp(-s |x|^2)
``stereo-sphere:n:a``      sphere of radius a in a stereographic chart
``poly-perturb:n:seed:e``  I + e * sum_k x_k S_k, S_k seeded random symmetric
``poly-square:n:seed:e``   I + e S(x) + e^2 S(x)^2 with the same S(x)

Every catalog metric carries closed-form first and second partials.
"""

from __future__ import annotations

import itertools

import numpy as np

from .geometry import MetricField, NotPositiveDefiniteError

__all__ = [
    "euclidean",
    "spherical3",
    "conformally_flat",
    "conf_gauss",
    "stereo_sphere",
    "poly_perturb",
    "poly_square",
    "get_metric",
    "metric_family",
    "CONFORMAL_LABELS",
]


def euclidean(n: int) -> MetricField:
    eye = np.eye(n)
    return MetricField(
        dimension=n,
        evaluator=lambda x: eye.copy(),
        first=lambda x: np.zeros((n, n, n)),
        second=lambda x: np.zeros((n, n, n, n)),
        label=f"euclidean:{n}",
        domain=(-1.0, 1.0),
        conformal=True,
    )


def _sph_g(x):
    r, th = x[0], x[1]
    return np.diag([1.0, r * r, (r * np.sin(th)) ** 2])


def _sph_dg(x):
    r, th = x[0], x[1]
    s, c = np.sin(th), np.cos(th)
    dg = np.zeros((3, 3, 3))
    dg[1, 1, 0] = 2 * r
    dg[2, 2, 0] = 2 * r * s * s
    dg[2, 2, 1] = 2 * r * r * s * c
    return dg


def _sph_d2g(x):
    r, th = x[0], x[1]
    s, c = np.sin(th), np.cos(th)
    d2 = np.zeros((3, 3, 3, 3))
    d2[1, 1, 0, 0] = 2.0
    d2[2, 2, 0, 0] = 2 * s * s
    d2[2, 2, 0, 1] = d2[2, 2, 1, 0] = 4 * r * s * c
    d2[2, 2, 1, 1] = 2 * r * r * (c * c - s * s)
    return d2


def spherical3() -> MetricField:
    # regular region only: r >= 0.1 and theta away from the poles
    return MetricField(
        dimension=3,
        evaluator=_sph_g,
        first=_sph_dg,
        second=_sph_d2g,
        label="spherical3",
        domain=([0.1, 0.1, 0.0], [3.0, np.pi - 0.1, 2 * np.pi]),
    )


def conformally_flat(n, factor, factor_grad, factor_hess, label, domain=(-1.0, 1.0)) -> MetricField:
    """Metric ``p(x) * identity`` from the squared conformal factor p = phi^2."""
    eye = np.eye(n)

    def first(x):
        return np.einsum("ab,c->abc", eye, factor_grad(x))

    def second(x):
        return np.einsum("ab,cd->abcd", eye, factor_hess(x))

    return MetricField(
        dimension=n,
        evaluator=lambda x: factor(x) * eye,
        first=first,
        second=second,
        label=label,
        domain=domain,
        conformal=True,
    )


def conf_gauss(n: int, sigma: float) -> MetricField:
    def p(x):
        return np.exp(-2 * sigma * (x @ x))

    def dp(x):
        return -4 * sigma * x * p(x)

    def d2p(x):
        return (16 * sigma**2 * np.outer(x, x) - 4 * sigma * np.eye(n)) * p(x)

    return conformally_flat(n, p, dp, d2p, f"conf-gauss:{n}:{sigma:g}")


def stereo_sphere(n: int, a: float = 1.0) -> MetricField:
    """Round sphere of radius ``a``; scalar curvature n(n-1)/a^2."""
    a2 = a * a
    k = 4 * a2 * a2

    def p(x):
        return k / (a2 + x @ x) ** 2

    def dp(x):
        return -4 * k * x / (a2 + x @ x) ** 3

    def d2p(x):
        s = a2 + x @ x
        return -4 * k * np.eye(n) / s**3 + 24 * k * np.outer(x, x) / s**4

    return conformally_flat(n, p, dp, d2p, f"stereo-sphere:{n}:{a:g}")


def poly_perturb(n: int, seed: int, eps: float) -> MetricField:
    """Identity plus a seeded symmetric perturbation linear in x.

    Raises NotPositiveDefiniteError if the metric fails to be positive
    definite anywhere on [-1, 1]^n; the smallest eigenvalue of an affine
    matrix family is concave, so checking the box corners suffices.
    """
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((n, n, n))
    S = 0.5 * (A + A.transpose(1, 0, 2))  # S[a, b, k]
    eye = np.eye(n)
    for corner in itertools.product((-1.0, 1.0), repeat=n):
        if np.linalg.eigvalsh(eye + eps * S @ np.array(corner))[0] <= 0:
            raise NotPositiveDefiniteError(
                f"poly-perturb:{n}:{seed}:{eps:g} is not positive definite on [-1, 1]^{n}"
            )
    dg = eps * S
    return MetricField(
        dimension=n,
        evaluator=lambda x: eye + eps * S @ x,
        first=lambda x: dg.copy(),
        second=lambda x: np.zeros((n, n, n, n)),
        label=f"poly-perturb:{n}:{seed}:{eps:g}",
        domain=(-1.0, 1.0),
    )


def poly_square(n: int, seed: int, eps: float) -> MetricField:
    """I + e S(x) + e^2 S(x)^2 with S(x) the poly-perturb matrix.

    Positive definite for every x (eigenvalues 1 + t + t^2 > 0) and, unlike
    the linear family, with non-vanishing second partials, so it is generic
    enough for the seven-term rank test.
    """
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((n, n, n))
    S = 0.5 * (A + A.transpose(1, 0, 2)) * eps  # eps S_k, indexed [a, b, k]
    eye = np.eye(n)

    def sx(x):
        return S @ x

    def g(x):
        m = sx(x)
        return eye + m + m @ m

    def first(x):
        m = sx(x)
        # d_c (m + m m) = S_c + S_c m + m S_c
        return S + np.einsum("abc,bd->adc", S, m) + np.einsum("ab,bdc->adc", m, S)

    def second(x):
        t = np.einsum("abc,bde->adce", S, S)
        return t + t.transpose(0, 1, 3, 2)

    return MetricField(
        dimension=n,
        evaluator=g,
        first=first,
        second=second,
        label=f"poly-square:{n}:{seed}:{eps:g}",
        domain=(-1.0, 1.0),
    )


def _int(tok: str) -> int:
    return int(tok.split("=", 1)[-1])


def _float(tok: str) -> float:
    return float(tok.split("=", 1)[-1])


def get_metric(label: str) -> MetricField:
    """Build a catalog metric from its label, e.g. ``"conf-gauss:3:0.25"``."""
    parts = label.strip().split(":")
    kind, args = parts[0], parts[1:]
    try:
        if kind == "euclidean" and len(args) == 1:
            return euclidean(_int(args[0]))
        if kind == "spherical3" and not args:
            return spherical3()
        if kind == "conf-gauss" and len(args) == 2:
            return conf_gauss(_int(args[0]), _float(args[1]))
        if kind == "stereo-sphere" and len(args) in (1, 2):
            return stereo_sphere(_int(args[0]), _float(args[1]) if args[1:] else 1.0)
        if kind == "poly-perturb" and len(args) == 3:
            return poly_perturb(_int(args[0]), _int(args[1]), _float(args[2]))
        if kind == "poly-square" and len(args) == 3:
            return poly_square(_int(args[0]), _int(args[1]), _float(args[2]))
    except ValueError as exc:
        if isinstance(exc, NotPositiveDefiniteError):
            raise
        raise ValueError(f"malformed metric label {label!r}: {exc}") from None
    raise ValueError(f"unknown metric label {label!r}")


def metric_family(spec: str) -> list[MetricField]:
    """Expand a family label whose seed slot may be a range, e.g.
    ``"poly-square:3:1-4:0.3"`` gives four metrics with seeds 1..4.
    Comma-separated labels are also accepted."""
    parts = spec.split(":")
    if parts[0] in ("poly-perturb", "poly-square") and len(parts) == 4 and "-" in parts[2].split("=")[-1]:
        try:
            lo, hi = (int(t) for t in parts[2].split("=")[-1].split("-"))
        except ValueError:
            raise ValueError(f"malformed seed range in {spec!r}") from None
        return [
            get_metric(":".join([parts[0], parts[1], str(s), parts[3]]))
            for s in range(lo, hi + 1)
        ]
    return [get_metric(s) for s in spec.split(",")]


CONFORMAL_LABELS = {
    n: [f"euclidean:{n}", f"conf-gauss:{n}:0.25", f"stereo-sphere:{n}:1"] for n in range(2, 7)
}
