"""Affine curves R -> R^m with Taylor jets.

Every curve exposes ``taylor(x, order)`` returning an array of shape
``(order + 1, m)`` whose row j is gamma^{(j)}(x) / j!. Closed-form families
(trigonometric and polynomial) are exact; :class:`FunctionCurve` wraps an
arbitrary callable and estimates its jet by central finite differences.
"""

from math import factorial

import numpy as np

from .errors import StepTooCoarse


class AffineCurve:
    """Base class; subclasses implement :meth:`taylor`."""

    dim: int

    def taylor(self, x, order):
        raise NotImplementedError

    def __call__(self, x):
        return self.taylor(x, 0)[0]

    def derivative(self, x, k):
        return self.taylor(x, k)[k] * factorial(k)


class TrigCurve(AffineCurve):
    """gamma_i(x) = c_i + l_i x + sum_f a_{i,f} cos(f x) + b_{i,f} sin(f x).

    Parameters
    ----------
    cos_coeffs, sin_coeffs : array_like, shape (m, F)
        Column f holds the coefficients of frequency ``freqs[f]``.
    freqs : array_like, shape (F,)
    const, linear : array_like, shape (m,), optional
    """

    def __init__(self, cos_coeffs, sin_coeffs, freqs, const=None, linear=None,
                 name=None):
        self.a = np.atleast_2d(np.asarray(cos_coeffs, dtype=float))
        self.b = np.atleast_2d(np.asarray(sin_coeffs, dtype=float))
        self.freqs = np.asarray(freqs, dtype=float)
        self.dim = self.a.shape[0]
        self.const = np.zeros(self.dim) if const is None else np.asarray(const, float)
        self.linear = np.zeros(self.dim) if linear is None else np.asarray(linear, float)
        self.name = name or "trig"

    def taylor(self, x, order):
        n = np.arange(order + 1)
        fact = np.array([float(factorial(int(k))) for k in n])
        # d^n/dx^n cos(f x) = f^n cos(f x + n pi/2), likewise for sin
        phase = np.outer(n, np.ones_like(self.freqs)) * (np.pi / 2)
        fx = self.freqs * x
        fn = self.freqs[None, :] ** n[:, None]
        cos_d = fn * np.cos(fx[None, :] + phase)
        sin_d = fn * np.sin(fx[None, :] + phase)
        out = cos_d @ self.a.T + sin_d @ self.b.T
        out[0] += self.const + self.linear * x
        if order >= 1:
            out[1] += self.linear
        return out / fact[:, None]


class PolynomialCurve(AffineCurve):
    """gamma_i(x) = sum_j coeffs[i][j] x^j."""

    def __init__(self, coeffs, name=None):
        self.coeffs = [np.asarray(c, dtype=float) for c in coeffs]
        self.dim = len(self.coeffs)
        self.name = name or "poly"

    def taylor(self, x, order):
        out = np.zeros((order + 1, self.dim))
        for i, c in enumerate(self.coeffs):
            p = np.polynomial.Polynomial(c)
            for j in range(order + 1):
                out[j, i] = p(x) / factorial(j)
                p = p.deriv()
        return out


def _central_weights(d, accuracy=4):
    """Weights w_j, j = -p..p, with sum_j w_j f(x + j h) / h^d ~ f^{(d)}(x)."""
    p = (d + accuracy - 1) // 2
    nodes = np.arange(-p, p + 1, dtype=float)
    vander = np.vander(nodes, increasing=True).T
    rhs = np.zeros(2 * p + 1)
    rhs[d] = factorial(d)
    return nodes, np.linalg.solve(vander, rhs)


class FunctionCurve(AffineCurve):
    """Arbitrary callable curve; jet estimated by order-4 central differences.

    The step is picked per call from ``steps`` by comparing the estimates at
    h and h/2; the pair that agrees best wins. If even the best pair
    disagrees by more than ``rtol`` (relative), :class:`StepTooCoarse` is
    raised.
    """

    def __init__(self, func, dim, steps=(0.2, 0.1, 0.05, 0.025, 0.0125), rtol=1e-5,
                 name=None):
        self.func = func
        self.dim = dim
        self.steps = steps
        self.rtol = rtol
        self.name = name or getattr(func, "__name__", "function")

    def _estimate(self, x, order, h):
        out = np.zeros((order + 1, self.dim))
        out[0] = np.asarray(self.func(x), dtype=float)
        for d in range(1, order + 1):
            nodes, w = _central_weights(d)
            vals = np.array([self.func(x + t * h) for t in nodes], dtype=float)
            out[d] = w @ vals / h**d
        return out

    def taylor(self, x, order):
        best = None
        for h in self.steps:
            coarse = self._estimate(x, order, h)
            fine = self._estimate(x, order, h / 2)
            scale = np.maximum(np.abs(fine), 1.0)
            err = float(np.max(np.abs(coarse - fine) / scale))
            if best is None or err < best[0]:
                best = (err, fine)
        err, fine = best
        if err > self.rtol:
            raise StepTooCoarse(
                f"finite-difference jet of order {order} unstable: "
                f"relative disagreement {err:.2e} > {self.rtol:.0e}")
        fact = np.array([float(factorial(k)) for k in range(order + 1)])
        return fine / fact[:, None]


def trig_test_curve(m, variant=0, amplitude=0.1):
    """Built-in non-degenerate test curve in R^m with non-constant invariants.

    For even m the base is the trigonometric moment curve
    (cos x, sin x, cos 2x, sin 2x, ...); for odd m the last coordinate is x,
    giving a generalized helix (a closed curve in R^m with m odd always has
    a vanishing Wronskian somewhere). ``variant`` seeds a small fixed
    perturbation so that the Wilczynski invariants vary along the curve.
    The orientation is chosen so that the Wronskian is positive.
    """
    nfreq = m // 2 + 1
    freqs = np.arange(1, nfreq + 1, dtype=float)
    a = np.zeros((m, nfreq))
    b = np.zeros((m, nfreq))
    linear = np.zeros(m)
    for i in range(2 * (m // 2)):
        if i % 2 == 0:
            a[i, i // 2] = 1.0
        else:
            b[i, i // 2] = 1.0
    if m % 2 == 1:
        linear[m - 1] = 1.0
    rng = np.random.default_rng(1000 + 17 * m + variant)
    a += amplitude * rng.standard_normal(a.shape) / freqs**m
    b += amplitude * rng.standard_normal(b.shape) / freqs**m
    curve = TrigCurve(a, b, freqs, linear=linear, name=f"trig-m{m}-v{variant}")
    jet = curve.taylor(0.0, m)[1:] * np.array(
        [factorial(j) for j in range(1, m + 1)], dtype=float)[:, None]
    if np.linalg.det(jet) < 0:
        a[m - 1] *= -1
        b[m - 1] *= -1
        linear[m - 1] *= -1
        curve = TrigCurve(a, b, freqs, linear=linear, name=curve.name)
    return curve
