"""Constructive counterexample pairs: signals x, y with Re(xx* - yy*) = H.

A symmetric 3x3 (or 2x2) target H with eigenvalues of both signs is always
realizable.  In the eigenbasis the problem reduces to a diagonal target
diag(a, b, -c) with a, c > 0, b >= 0, solved in closed form: put a quarter
turn between the first two coordinates of both vectors so the (1,2) and
(1,3) real cross terms vanish, then match moduli through

    |y1| / sqrt(a + |y1|^2) = |y2| / sqrt(b + |y2|^2) = |x3| / sqrt(c + |x3|^2),

with |x1| = sqrt(a + |y1|^2), |x2| = sqrt(b + |y2|^2), |y3| = sqrt(c + |x3|^2).
The free modulus |y1| is fixed at 1, which keeps conditioning mild over
several orders of magnitude of (a, b, c).  An orthogonal change of basis U
then transports diagonal pairs to general targets via
Re((Ux)(Ux)* - (Uy)(Uy)*) = U Re(xx* - yy*) U^T.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import real_lift
from .errors import DefiniteInputError, ValidationError, WrongDimensionError
from .frames_io import RealFrame

_EPS = float(np.finfo(np.float64).eps)

#: Eigenvalues within this relative band of zero route to the degenerate case.
ZERO_EIG_TOL = 1e-10


@dataclass(frozen=True)
class WitnessPair:
    """Non-equivalent pair (x, y) realizing a symmetric target matrix.

    ``residual`` is |Re(xx* - yy*) - target|_F / max(|target|_F, eps); a
    fresh synthesis keeps it below 1e-10.
    """

    x: np.ndarray
    y: np.ndarray
    target: np.ndarray
    residual: float


def _pair(x: np.ndarray, y: np.ndarray, target: np.ndarray) -> WitnessPair:
    achieved = real_lift(x) - real_lift(y)
    res = float(
        np.linalg.norm(achieved - target) / max(np.linalg.norm(target), _EPS)
    )
    return WitnessPair(x, y, np.asarray(target, dtype=np.float64), res)


def _check_positive(**params: float) -> None:
    for name, val in params.items():
        if not np.isfinite(val) or val <= 0:
            raise ValidationError(f"{name} must be positive and finite, got {val}")


def witness_diag_m3(a: float, b: float, c: float) -> WitnessPair:
    """Pair in C^3 with Re(xx* - yy*) = diag(a, b, -c), all of a, b, c > 0."""
    _check_positive(a=a, b=b, c=c)
    # |y1| = 1; ratio^2 = r^2/(1-r^2) = 1/a for r = 1/sqrt(a+1)
    y2 = np.sqrt(b / a)
    x3 = np.sqrt(c / a)
    x1 = np.sqrt(a + 1.0)
    x2 = np.sqrt(b + y2 * y2)
    y3 = np.sqrt(c + x3 * x3)
    x = np.array([1j * x1, x2, x3], dtype=np.complex128)
    y = np.array([1j * 1.0, y2, y3], dtype=np.complex128)
    return _pair(x, y, np.diag([a, b, -c]))


def witness_diag_m3_degenerate(a: float, c: float) -> WitnessPair:
    """Pair in C^3 with Re(xx* - yy*) = diag(a, 0, -c), a, c > 0.

    Middle coordinate carries equal moduli and a quarter turn against both
    neighbours, so its row of the difference vanishes identically.
    """
    _check_positive(a=a, c=c)
    x3 = np.sqrt(c / a)
    x1 = np.sqrt(a + 1.0)
    y3 = np.sqrt(c + x3 * x3)
    # phases (pi, pi/2, 0) for both vectors
    x = np.array([-x1, 1j * 1.0, x3], dtype=np.complex128)
    y = np.array([-1.0, 1j * 1.0, y3], dtype=np.complex128)
    return _pair(x, y, np.diag([a, 0.0, -c]))


def witness_diag_m2(a: float, c: float) -> WitnessPair:
    """Pair in C^2 with Re(xx* - yy*) = diag(a, -c), a, c > 0."""
    _check_positive(a=a, c=c)
    x2 = np.sqrt(c / a)
    x1 = np.sqrt(a + 1.0)
    y2 = np.sqrt(c + x2 * x2)
    x = np.array([1j * x1, x2], dtype=np.complex128)
    y = np.array([1j * 1.0, y2], dtype=np.complex128)
    return _pair(x, y, np.diag([a, -c]))


def witness_general(H, tol: float = ZERO_EIG_TOL) -> WitnessPair:
    """Pair realizing an arbitrary indefinite symmetric 2x2 or 3x3 target.

    Eigenvalues within tol * |H|_F of zero count as zero.  Raises
    DefiniteInputError when H has eigenvalues of only one sign (no pair can
    realize it: diagonal entries of Re(zz*) are nonnegative), and
    WrongDimensionError for m >= 4, where no general construction is known.
    """
    H = np.asarray(H, dtype=np.float64)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValidationError(f"target must be square, got shape {H.shape}")
    if not np.all(np.isfinite(H)):
        raise ValidationError("target has non-finite entries")
    if not np.array_equal(H, H.T):
        raise ValidationError("target must be exactly symmetric")
    m = H.shape[0]
    if m not in (2, 3):
        raise WrongDimensionError(f"general witnesses exist only for m in {{2, 3}}, got m={m}")
    scale = np.linalg.norm(H)
    if scale == 0.0:
        raise DefiniteInputError("zero target has no non-equivalent realization")
    w, U = np.linalg.eigh(H)
    w, U = w[::-1], U[:, ::-1]  # descending
    zero = tol * scale
    npos = int(np.sum(w > zero))
    nneg = int(np.sum(w < -zero))
    if npos == 0 or nneg == 0:
        raise DefiniteInputError(
            "target is positive or negative semidefinite up to tolerance"
        )
    if m == 2:
        base = witness_diag_m2(w[0], -w[1])
    elif npos == 2:
        base = witness_diag_m3(w[0], w[1], -w[2])
    elif nneg == 2:
        # mirror: realize -H (two positive eigenvalues) and swap the pair
        mirrored = witness_general(-H, tol)
        return _pair(mirrored.y, mirrored.x, H)
    else:
        base = witness_diag_m3_degenerate(w[0], -w[2])
    return _pair(U @ base.x, U @ base.y, H)


def cone_frame(n: int, angles=None) -> RealFrame:
    """Frame of vectors (cos t, sin t, 1) on the cone x1^2 + x2^2 = x3^2.

    Every column annihilates the quadratic form diag(1, 1, -1), so the pair
    realizing that target has identical measurements under this frame no
    matter how many vectors are taken; with n >= 5 the frame nevertheless
    has the complement property.  Default angles are equispaced, t_k = 2 pi k / n.
    """
    if n < 3:
        raise ValidationError("cone frame needs at least 3 vectors")
    if angles is None:
        t = 2.0 * np.pi * np.arange(n) / n
    else:
        t = np.asarray(angles, dtype=np.float64)
        if t.shape != (n,):
            raise ValidationError(f"expected {n} angles, got shape {t.shape}")
        if not np.all(np.isfinite(t)):
            raise ValidationError("angles must be finite")
        if np.unique(np.mod(t, 2.0 * np.pi)).size != n:
            raise ValidationError("angles must be distinct modulo 2 pi")
    mat = np.vstack([np.cos(t), np.sin(t), np.ones(n)])
    return RealFrame(mat)
