"""Retrievability certificates, falsification, and strictness analysis.

Decision structure for a real frame on C^M:

* too few vectors (N <= 2M-2): never retrievable; a complement-property
  violating split is attached, and for M <= 3 an explicit pair as well;
* M = 2: the complement property decides exactly;
* M = 3: injectivity of the lifted operator decides exactly, and any
  kernel element yields an explicit counterexample pair;
* M >= 4: an injective lifted operator certifies retrievability; a
  nontrivial kernel leaves the question open (a kernel element is only a
  counterexample if it is realizable as Re(xx* - yy*), which is not
  decidable here), so the verdict is Undecided, optionally refined by a
  randomized search for an explicit pair.

Undecided is an honest verdict: search failure is never converted into a
certificate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import im_products, is_phased_real, real_lift
from .errors import (
    DefiniteInputError,
    IndefinitenessViolationError,
    NoKernelError,
    ValidationError,
    WrongDimensionError,
)
from .frames_io import ComplexFrame, RealFrame, rng_stream
from .lift import lift_dim, devectorize, numeric_rank, omega_matrix
from .witness import WitnessPair, witness_general
from . import _kernels

_EPS = float(np.finfo(np.float64).eps)

CERT_VERDICTS = ("CertifiedCPR", "NotCPR", "Undecided")
CERT_METHODS = (
    "Det2",
    "Det3",
    "KernelInjective",
    "ComplementPropertyM2",
    "TooFewVectors",
    "KernelWitness",
    "SearchWitness",
    "MonteCarlo",
)
STRICT_VERDICTS = ("StrictlyCPR", "ComplexPRCandidate", "NotCPR", "Undecided")

#: Singular values below this fraction of sigma_max count as zero.
KERNEL_TOL = 1e-10

#: Minimum lift-space separation a searched pair must exhibit.
SEARCH_DISTANCE = 0.1
_SEARCH_PENALTY = 1e3
_SEARCH_MAX_ITER = 100
_SEARCH_F_TOL = 1e-12

_STRICT_SEED = 0x5C1C7  # fixed: strict_report is deterministic


@dataclass(frozen=True)
class Certificate:
    """Retrievability verdict plus the evidence that produced it."""

    verdict: str
    method: str
    det_value: float | None = None
    kernel_dim: int | None = None
    witness: WitnessPair | None = None
    trials: dict | None = None
    violating_subset: tuple | None = None


@dataclass(frozen=True)
class StrictReport:
    """Conjugation-blindness analysis of a (possibly complex) frame.

    StrictlyCPR means: *if* the frame retrieves conjugate classes, it cannot
    retrieve complex phases, witnessed by ``witness_y`` (a non-phased-real
    signal whose measurements cannot be told from its conjugate's).  The
    report never asserts retrievability itself; combine with certify.
    """

    verdict: str
    witness_y: np.ndarray | None = None
    im_gram_nullity: int = 0


def _require_real_frame(frame, who: str) -> RealFrame:
    if isinstance(frame, ComplexFrame):
        raise ValidationError(
            f"{who} requires a real frame; use strict_report for complex frames"
        )
    if not isinstance(frame, RealFrame):
        frame = RealFrame(np.asarray(frame, dtype=np.float64))
    return frame


def _spans(mat: np.ndarray, cols, m: int) -> bool:
    if len(cols) < m:
        return False
    return numeric_rank(mat[:, cols]) == m


def complement_property(frame, field: str = "auto", cap: int = 24):
    """Exhaustively check that one side of every index split spans.

    Returns (True, None) or (False, violating_indices).  For real-valued
    frames the real and complex verdicts coincide (a real matrix has the
    same rank over both fields), so ``field`` only validates intent.
    Refuses N > cap outright: the check walks all 2^(N-1) splits.
    """
    if field not in ("auto", "real", "complex"):
        raise ValidationError("field must be auto|real|complex")
    mat = frame.matrix if hasattr(frame, "matrix") else np.asarray(frame)
    m, n = mat.shape
    if n > cap:
        raise ValidationError(
            f"complement property check over {n} vectors needs 2^{n - 1} splits; "
            f"refusing beyond cap={cap}"
        )
    if field == "real" and np.iscomplexobj(mat):
        raise ValidationError("field='real' but the frame has complex entries")
    # Each unordered split once: enumerate subsets containing index 0.
    rest = list(range(1, n))
    for bits in range(1 << (n - 1)):
        subset = [0] + [rest[j] for j in range(n - 1) if bits >> j & 1]
        if _spans(mat, subset, m):
            continue
        complement = [k for k in range(n) if k not in subset]
        if not _spans(mat, complement, m):
            return False, tuple(subset)
    return True, None


def _nullspace(mat: np.ndarray, tol: float, floor: float = 0.0) -> list[np.ndarray]:
    # Rows of Vh whose singular value is <= tol * max(sigma_max, floor);
    # the floor lets an all-round-off matrix count as entirely null.
    _, s, vh = np.linalg.svd(mat)
    cols = mat.shape[1]
    scale = max(s[0] if s.size else 0.0, floor)
    return [vh[i] for i in range(cols) if i >= s.size or s[i] <= tol * scale]


def kernel_basis(omega, tol: float = KERNEL_TOL) -> list[np.ndarray]:
    """Orthonormal basis of the numerical nullspace of the lifted operator."""
    omega = np.asarray(omega, dtype=np.float64)
    if omega.ndim != 2:
        raise ValidationError("omega must be a matrix")
    return _nullspace(omega, tol)


def _det_certifies(om: np.ndarray, det: float) -> bool:
    # Hadamard bound: |det| of a matrix is at most the product of row norms.
    bound = float(np.prod(np.linalg.norm(om, axis=1)))
    return abs(det) > 1e-10 * bound


def falsify_exact(frame, tol: float = 1e-9) -> WitnessPair:
    """Counterexample pair from a kernel element of the lifted operator.

    Exact for M in {2, 3}: a spanning frame forces every kernel matrix to be
    indefinite, which is always realizable as Re(xx* - yy*).  The kernel
    vector is unit, so the pair's class distance equals |Q_v|_F >= 1.
    """
    frame = _require_real_frame(frame, "falsify_exact")
    if frame.m not in (2, 3):
        raise WrongDimensionError("exact falsification applies to M in {2, 3}")
    basis = kernel_basis(omega_matrix(frame))
    if not basis:
        raise NoKernelError("lifted operator is injective; no kernel to realize")
    q_v = devectorize(basis[0])
    try:
        pair = witness_general(q_v)
    except DefiniteInputError as exc:
        raise IndefinitenessViolationError(
            "kernel matrix is one-signed; the input cannot be a spanning frame"
        ) from exc
    if pair.residual > tol:
        raise IndefinitenessViolationError(
            f"witness synthesis residual {pair.residual:.2e} exceeds tol"
        )
    return pair


def _search_starts(m: int, budget: int, seed: int) -> np.ndarray:
    children = np.random.SeedSequence(entropy=seed).spawn(budget)
    starts = np.empty((budget, 4 * m))
    for i, child in enumerate(children):
        starts[i] = np.random.default_rng(child).standard_normal(4 * m)
    return starts


def _search_with_stats(frame, budget: int, seed: int):
    if budget < 1:
        raise ValidationError("budget must be at least 1")
    phi = frame.matrix
    m = phi.shape[0]
    starts = _search_starts(m, budget, seed)
    zs, fs, fmeas, ds, _ = _kernels.pair_search(
        phi, starts, SEARCH_DISTANCE, _SEARCH_PENALTY, _SEARCH_MAX_ITER
    )
    success = (fs <= _SEARCH_F_TOL) & (ds >= SEARCH_DISTANCE)
    best = int(np.argmin(fs))
    stats = {
        "restarts": int(budget),
        "seed": int(seed),
        "best_gap": float(np.sqrt(fmeas[best])),
        "best_distance": float(ds[best]),
    }
    hits = np.nonzero(success)[0]
    if hits.size == 0:
        return None, stats
    z = zs[int(hits[0])]
    x = z[:m] + 1j * z[m : 2 * m]
    y = z[2 * m : 3 * m] + 1j * z[3 * m :]
    target = real_lift(x) - real_lift(y)
    return WitnessPair(x, y, target, 0.0), stats


def falsify_search(frame, budget: int = 10_000, seed: int = 0) -> WitnessPair | None:
    """Randomized multistart search for a measurement-equal distinct pair.

    Minimizes the squared measurement gap plus a quadratic penalty keeping
    the pair's lift distance at least 0.1, over the joint sphere
    |x|^2 + |y|^2 = 2 (witness pairs generally have |x| != |y|; only joint
    scaling is quotiented out).  Returns a pair only when the gap objective
    falls below 1e-12 with the distance bound met; absence of a pair is
    never a certificate.  Deterministic in (budget, seed): restart i draws
    its start from the (seed, i) stream.
    """
    frame = _require_real_frame(frame, "falsify_search")
    pair, _ = _search_with_stats(frame, budget, seed)
    return pair


def certify(frame, *, budget: int = 0, seed: int = 0, cp_cap: int = 24) -> Certificate:
    """Decide conjugate retrievability of a real frame.

    ``budget`` > 0 lets the M >= 4 Undecided path run falsify_search; a
    found pair upgrades the verdict to NotCPR (SearchWitness), an exhausted
    budget reports Undecided with the trial statistics.
    """
    frame = _require_real_frame(frame, "certify")
    m, n = frame.m, frame.n
    om = omega_matrix(frame)
    det_val = float(np.linalg.det(om)) if n == lift_dim(m) else None
    basis = kernel_basis(om)
    kdim = len(basis)

    if m >= 2 and n <= 2 * m - 2:
        # Both halves of this split have < m vectors, so neither spans.
        violating = tuple(range((n + 1) // 2))
        pair = None
        trials = None
        if m <= 3:
            pair = falsify_exact(frame)
        elif budget > 0:
            pair, trials = _search_with_stats(frame, budget, seed)
        return Certificate(
            "NotCPR",
            "TooFewVectors",
            det_value=det_val,
            kernel_dim=kdim,
            witness=pair,
            trials=trials,
            violating_subset=violating,
        )

    if m == 1:
        # On C^1 conjugate classes are plain magnitudes; any frame works.
        return Certificate(
            "CertifiedCPR", "KernelInjective", det_value=det_val, kernel_dim=kdim
        )

    if m == 2:
        cp_ran = n <= cp_cap
        if cp_ran:
            ok, violating = complement_property(frame, cap=cp_cap)
        else:
            # CP check refuses large N; the kernel test is equally exact here.
            ok, violating = kdim == 0, None
        if ok:
            if det_val is not None and _det_certifies(om, det_val):
                method = "Det2"
            else:
                method = "ComplementPropertyM2" if cp_ran else "KernelInjective"
            return Certificate(
                "CertifiedCPR", method, det_value=det_val, kernel_dim=kdim
            )
        return Certificate(
            "NotCPR",
            "KernelWitness",
            det_value=det_val,
            kernel_dim=kdim,
            witness=falsify_exact(frame),
            violating_subset=violating,
        )

    if m == 3:
        if kdim == 0:
            method = (
                "Det3"
                if det_val is not None and _det_certifies(om, det_val)
                else "KernelInjective"
            )
            return Certificate(
                "CertifiedCPR", method, det_value=det_val, kernel_dim=kdim
            )
        return Certificate(
            "NotCPR",
            "KernelWitness",
            det_value=det_val,
            kernel_dim=kdim,
            witness=falsify_exact(frame),
        )

    # m >= 4
    if kdim == 0:
        return Certificate(
            "CertifiedCPR", "KernelInjective", det_value=det_val, kernel_dim=kdim
        )
    if budget > 0:
        pair, trials = _search_with_stats(frame, budget, seed)
        if pair is not None:
            return Certificate(
                "NotCPR",
                "SearchWitness",
                det_value=det_val,
                kernel_dim=kdim,
                witness=pair,
                trials=trials,
            )
        return Certificate(
            "Undecided", "MonteCarlo", det_value=det_val, kernel_dim=kdim, trials=trials
        )
    return Certificate(
        "Undecided",
        "MonteCarlo",
        det_value=det_val,
        kernel_dim=kdim,
        trials={"restarts": 0, "seed": int(seed)},
    )


# ---------------------------------------------------------------------------
# strict conjugate retrievability (complex frames)
# ---------------------------------------------------------------------------


def im_gram(frame) -> np.ndarray:
    """N x M(M-1)/2 matrix; row n lists Im(conj(phi_jn) phi_kn) over j < k.

    A signal y has conjugation-blind measurements under the frame exactly
    when the pair vector s_jk = Im(y_j conj(y_k)) lies in this matrix's
    nullspace.
    """
    mat = frame.matrix if hasattr(frame, "matrix") else np.asarray(frame)
    m, n = mat.shape
    rows = np.empty((n, m * (m - 1) // 2))
    col = np.empty(m, dtype=np.complex128)
    for k in range(n):
        col[:] = mat[:, k]
        rows[k] = -im_products(col)  # Im(conj(a) b) = -Im(a conj(b))
    return rows


def _skew_from_pairs(s: np.ndarray, m: int) -> np.ndarray:
    S = np.zeros((m, m))
    iu, ju = np.triu_indices(m, k=1)
    S[iu, ju] = s
    S[ju, iu] = -s
    return S


def _pairs_from_skew(S: np.ndarray) -> np.ndarray:
    iu, ju = np.triu_indices(S.shape[0], k=1)
    return S[iu, ju]


def _factor_rank2_skew(S: np.ndarray):
    """Top rotation block of a skew matrix: returns (a, b, S2).

    S2 = b a^T - a b^T is the nearest rank-2 skew matrix, so y = a + i b has
    Im(y_j conj(y_k)) equal to the entries of S2.
    """
    w, Z = np.linalg.eig(S)
    k = int(np.argmax(w.imag))
    z = Z[:, k]
    p, q = z.real, z.imag
    u1 = p / np.linalg.norm(p)
    q_perp = q - np.dot(q, u1) * u1
    u2 = q_perp / np.linalg.norm(q_perp)
    gamma = float(u1 @ S @ u2)
    if gamma < 0.0:
        u1, u2 = u2, u1
        gamma = -gamma
    a = u2 * np.sqrt(gamma)
    b = u1 * np.sqrt(gamma)
    S2 = np.outer(b, a) - np.outer(a, b)
    return a, b, S2


def _conjugation_gap_ok(frame_mat: np.ndarray, y: np.ndarray, tol: float) -> bool:
    inner = frame_mat.conj().T @ y
    inner_conj = frame_mat.conj().T @ y.conj()
    gaps = np.abs(np.abs(inner) ** 2 - np.abs(inner_conj) ** 2)
    scale = float(np.linalg.norm(y) ** 2) * np.linalg.norm(frame_mat, axis=0) ** 2
    return bool(np.all(gaps <= tol * np.maximum(scale, _EPS)))


def strict_report(frame, tol: float = 1e-9, budget: int = 16) -> StrictReport:
    """Classify whether retrievability by this frame could be conjugation-blind.

    Real frames always are: measurements of y and its conjugate coincide
    identically, witnessed by (1, i, 0, ..., 0).  For complex frames the
    question reduces to whether the nullspace of the pairwise imaginary
    Gram matrix contains a vector realizable as Im(y_j conj(y_k)) for some
    non-phased-real y; such a matrix is skew of rank <= 2.  For M <= 3 every
    nonzero nullspace vector qualifies; for M >= 4 a realizable point is
    sought by alternating projection between the nullspace and the rank-2
    skew cone (``budget`` restarts), with failure reported as Undecided.
    """
    mat = frame.matrix if hasattr(frame, "matrix") else np.asarray(frame)
    m, n = mat.shape
    if m == 1:
        # every scalar is phased real; conjugation is invisible but harmless
        return StrictReport("ComplexPRCandidate", None, 0)
    pair_dim = m * (m - 1) // 2
    all_real = not np.iscomplexobj(mat) or bool(np.all(mat.imag == 0.0))
    if all_real:
        y = np.zeros(m, dtype=np.complex128)
        y[0] = 1.0
        y[1] = 1.0j
        return StrictReport("StrictlyCPR", witness_y=y, im_gram_nullity=pair_dim)

    G = im_gram(frame)
    # Entries of G are pairwise products of frame entries, so a row's natural
    # scale is |phi_n|^2; the floor makes an all-round-off G fully null.
    gscale = float(np.max(np.linalg.norm(mat, axis=0) ** 2))
    null_vecs = _nullspace(G, KERNEL_TOL, floor=gscale)
    nullity = len(null_vecs)
    if nullity == 0:
        return StrictReport("ComplexPRCandidate", None, 0)

    cmat = np.asarray(mat, dtype=np.complex128)

    if m == 2:
        # the pair space is one-dimensional: any nonzero s is realizable
        y = np.array([1.0, 1.0j])
        if _conjugation_gap_ok(cmat, y, tol):
            return StrictReport("StrictlyCPR", witness_y=y, im_gram_nullity=nullity)
        return StrictReport("Undecided", None, nullity)

    if m == 3:
        # every nonzero 3x3 skew matrix has rank exactly 2
        a, b, _ = _factor_rank2_skew(_skew_from_pairs(null_vecs[0], m))
        y = a + 1j * b
        if not is_phased_real(y) and _conjugation_gap_ok(cmat, y, tol):
            return StrictReport("StrictlyCPR", witness_y=y, im_gram_nullity=nullity)
        return StrictReport("Undecided", None, nullity)

    # m >= 4: search null(G) for a rank-2 realizable point by alternating
    # projection between the nullspace and the rank-2 skew cone
    basis = np.vstack(null_vecs)  # (k, pair_dim), orthonormal rows
    for restart in range(budget):
        rng = rng_stream(_STRICT_SEED, restart)
        s = basis.T @ rng.standard_normal(basis.shape[0])
        norm = np.linalg.norm(s)
        if norm <= _EPS:
            continue
        s /= norm
        realizable = False
        for _ in range(300):
            S = _skew_from_pairs(s, m)
            a, b, S2 = _factor_rank2_skew(S)
            if np.linalg.norm(S - S2) <= 1e-11 * np.linalg.norm(S):
                realizable = True
                break
            s3 = basis.T @ (basis @ _pairs_from_skew(S2))
            norm3 = np.linalg.norm(s3)
            if norm3 <= 1e-12:
                break  # collapsed toward zero; restart
            s = s3 / norm3
        if not realizable:
            continue
        y = a + 1j * b
        if not is_phased_real(y) and _conjugation_gap_ok(cmat, y, tol):
            return StrictReport("StrictlyCPR", witness_y=y, im_gram_nullity=nullity)
    return StrictReport("Undecided", None, nullity)
