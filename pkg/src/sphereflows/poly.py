"""Complex univariate polynomials.

Coefficients are stored in ascending degree.  Roots are computed by
simultaneous Aberth-Ehrlich iteration followed by Newton polishing, with
clusters of approximate roots merged into multiple roots.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

DEFAULT_TOL = 1e-11


class RootFindingError(RuntimeError):
    """Raised when the root iteration does not converge."""


@dataclass(frozen=True)
class ComplexPoly:
    """Polynomial with complex coefficients in ascending degree.

    Trailing zero coefficients are stripped on construction, so the leading
    coefficient is nonzero unless the polynomial is identically zero (which
    is stored as ``(0j,)``).
    """

    coeffs: tuple[complex, ...]

    def __init__(self, coeffs: Iterable[complex]):
        cs = [complex(c) for c in coeffs]
        while len(cs) > 1 and cs[-1] == 0:
            cs.pop()
        if not cs:
            cs = [0j]
        object.__setattr__(self, "coeffs", tuple(cs))

    @property
    def degree(self) -> int:
        if len(self.coeffs) == 1 and self.coeffs[0] == 0:
            return -1
        return len(self.coeffs) - 1

    @property
    def leading(self) -> complex:
        return self.coeffs[-1]

    def is_zero(self) -> bool:
        return self.degree < 0

    def __call__(self, w: complex) -> complex:
        return evaluate(self, w, 0)

    def __mul__(self, other: "ComplexPoly") -> "ComplexPoly":
        return ComplexPoly(np.convolve(self.coeffs, other.coeffs))

    def __add__(self, other: "ComplexPoly") -> "ComplexPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        a = np.zeros(n, complex)
        a[: len(self.coeffs)] += self.coeffs
        a[: len(other.coeffs)] += other.coeffs
        return ComplexPoly(a)

    def scale(self, c: complex) -> "ComplexPoly":
        return ComplexPoly(c * x for x in self.coeffs)

    def derivative(self) -> "ComplexPoly":
        if len(self.coeffs) == 1:
            return ComplexPoly([0j])
        return ComplexPoly(k * c for k, c in enumerate(self.coeffs) if k > 0)

    def antiderivative(self, constant: complex = 0j) -> "ComplexPoly":
        return ComplexPoly([constant] + [c / (k + 1) for k, c in enumerate(self.coeffs)])

    def reversed(self, n: int | None = None) -> "ComplexPoly":
        """Return ``w**n p(1/w)``; ``n`` defaults to the degree."""
        n = self.degree if n is None else n
        cs = list(self.coeffs) + [0j] * max(0, n + 1 - len(self.coeffs))
        return ComplexPoly(cs[: n + 1][::-1])

    def to_json(self) -> list[list[float]]:
        return [[c.real, c.imag] for c in self.coeffs]

    @classmethod
    def from_json(cls, data: Sequence[Sequence[float]]) -> "ComplexPoly":
        return cls(complex(re, im) for re, im in data)


@dataclass(frozen=True)
class RootSet:
    """Roots with multiplicities, in a deterministic order."""

    roots: tuple[tuple[complex, int], ...]

    def locations(self) -> list[complex]:
        return [r for r, _ in self.roots]

    def expanded(self) -> list[complex]:
        """Roots repeated according to multiplicity."""
        return [r for r, m in self.roots for _ in range(m)]

    @property
    def total(self) -> int:
        return sum(m for _, m in self.roots)

    def all_simple(self) -> bool:
        return all(m == 1 for _, m in self.roots)


def from_roots(roots: Iterable[complex], a: complex = 1.0) -> ComplexPoly:
    """Expand ``a * prod(w - r)``."""
    if a == 0:
        raise ValueError("prefactor a must be nonzero")
    cs = np.array([complex(a)])
    for r in roots:
        # multiply by (w - r): ascending convolution with [-r, 1]
        cs = np.convolve(cs, [-complex(r), 1.0])
    return ComplexPoly(cs)


def evaluate(p: ComplexPoly, w: complex, order: int = 0) -> complex:
    """Value of the ``order``-th derivative of ``p`` at ``w``.

    Uses repeated synthetic division (Horner), so the cost is
    ``O(degree * order)``.
    """
    if order < 0:
        raise ValueError("order must be nonnegative")
    cs = list(p.coeffs)
    n = len(cs) - 1
    if order > n:
        return 0j
    # derivs[k] accumulates the k-th Taylor coefficient at w
    derivs = [0j] * (order + 1)
    for c in reversed(cs):
        for k in range(order, 0, -1):
            derivs[k] = derivs[k] * w + derivs[k - 1]
        derivs[0] = derivs[0] * w + c
    return derivs[order] * math.factorial(order)


def _residual_scale(cs: Sequence[complex], w: complex) -> float:
    aw = abs(w)
    return sum(abs(c) * aw**k for k, c in enumerate(cs))


def _aberth(cs: np.ndarray, max_iter: int, tol: float) -> np.ndarray:
    n = len(cs) - 1
    monic = cs / cs[-1]
    # Fujiwara-type bound for the initial circle
    radius = 2 * max(abs(monic[k]) ** (1.0 / (n - k)) for k in range(n))
    radius = max(radius, 1e-300)
    k = np.arange(n)
    z = radius * 0.5 * np.exp(1j * (2 * np.pi * k / n + 0.4)) * (1 + 0.01 * np.sin(k + 1))
    pc = monic[::-1]
    dc = np.polyder(pc)
    for _ in range(max_iter):
        pz = np.polyval(pc, z)
        dz = np.polyval(dc, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = pz / dz
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, 1.0)
            inv = 1.0 / diff
            np.fill_diagonal(inv, 0.0)
            s = inv.sum(axis=1)
            corr = ratio / (1 - ratio * s)
        corr = np.where(np.isfinite(corr), corr, 0.0)
        z = z - corr
        if np.all(np.abs(corr) <= 4 * np.finfo(float).eps * np.maximum(np.abs(z), 1e-300)):
            return z
        if np.all(np.abs(pz) == 0):
            return z
    return z


def _newton(p: ComplexPoly, z: complex, steps: int = 8) -> complex:
    for _ in range(steps):
        d = evaluate(p, z, 1)
        if d == 0:
            break
        step = evaluate(p, z, 0) / d
        z -= step
        if abs(step) <= 2e-16 * max(abs(z), 1e-300):
            break
    return z


def find_roots(p: ComplexPoly, tol: float = DEFAULT_TOL, max_iter: int = 500) -> RootSet:
    """Locate all roots of ``p`` with multiplicities.

    Parameters
    ----------
    p : ComplexPoly
        Polynomial of degree at least one.
    tol : float
        Relative residual tolerance.  A root is treated as multiple when
        ``|p'(root)| < sqrt(tol) * max|coeff|``.
    max_iter : int
        Iteration cap for the simultaneous iteration.

    Returns
    -------
    RootSet
        Roots sorted by (real, imag) with multiplicities summing to the degree.

    Raises
    ------
    RootFindingError
        If a root fails the residual test after iteration and polishing.
    """
    n = p.degree
    if n < 1:
        raise ValueError("find_roots needs degree >= 1")
    cs = np.array(p.coeffs, complex)
    # factor out roots at the origin exactly
    nz = 0
    while nz < n and cs[nz] == 0:
        nz += 1
    found: list[complex] = [0j] * nz
    rest = cs[nz:]
    if len(rest) > 1:
        if len(rest) == 2:
            found.append(-rest[0] / rest[1])
        else:
            found.extend(complex(z) for z in _aberth(rest, max_iter, tol))
    cmax = float(np.max(np.abs(cs)))
    dpoly = p.derivative()
    flagged = [abs(evaluate(dpoly, z)) < math.sqrt(tol) * cmax for z in found]
    # cluster flagged approximations
    groups: list[list[int]] = []
    used = [False] * len(found)
    for i, z in enumerate(found):
        if used[i]:
            continue
        group = [i]
        used[i] = True
        if flagged[i]:
            changed = True
            while changed:
                changed = False
                for j, zj in enumerate(found):
                    if used[j] or not flagged[j]:
                        continue
                    if any(abs(zj - found[g]) < 1e-4 * max(1.0, abs(found[g])) for g in group):
                        group.append(j)
                        used[j] = True
                        changed = True
        groups.append(group)
    out: list[tuple[complex, int]] = []
    for group in groups:
        m = len(group)
        z = complex(np.mean([found[g] for g in group]))
        q = p
        for _ in range(m - 1):
            q = q.derivative()
        z = _newton(q, z)
        scale = _residual_scale(p.coeffs, z)
        if m == 1 and abs(evaluate(p, z)) > tol * max(scale, 1e-300):
            raise RootFindingError(f"root near {z} did not converge (residual {abs(evaluate(p, z)):.3e})")
        out.append((z, m))
    out.sort(key=lambda rm: (round(rm[0].real, 12), round(rm[0].imag, 12)))
    return RootSet(tuple(out))


def roots_of_unity(n: int, rotation: float = 0.0) -> list[complex]:
    """The ``n`` points ``exp(i(2 pi k / n + rotation))``."""
    return [cmath.exp(1j * (2 * math.pi * k / n + rotation)) for k in range(n)]
