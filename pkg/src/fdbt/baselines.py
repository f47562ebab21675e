"""Classical reduction baselines: plain balanced truncation, generalized
singular perturbation approximation, and band-limited Gramian truncation.

All three balance a Gramian pair and keep the leading states; they differ
in which Gramians they balance and how the discarded states are folded
back. Only the first two carry an error bound (twice the dropped singular
values, whole-axis; the residualization variant only at rho = 0).
"""

from __future__ import annotations

import math

import numpy as np

from .errors import (
    IndefiniteGramian,
    InvalidParameters,
    NotHurwitz,
    SingularResidualization,
)
from .linalg import balance_gramians, hermitize, log_principal, solve_lyapunov
from .reduction import (
    ReductionResult,
    check_order,
    leading_block,
    partition,
)
from .sysmodel import StateSpace, is_hurwitz


def standard_gramians(sys: StateSpace):
    """Whole-axis controllability and observability Gramians (wc, wo)."""
    if not is_hurwitz(sys).stable:
        raise NotHurwitz("standard Gramians need a Hurwitz system")
    wc = solve_lyapunov(sys.A, sys.B @ sys.B.conj().T)
    wo = solve_lyapunov(sys.A.conj().T, sys.C.conj().T @ sys.C)
    return wc, wo


def fibt_reduce(sys: StateSpace, r: int) -> ReductionResult:
    """Balanced truncation on the standard Gramian pair.

    Attaches the classical whole-axis bound: twice the sum of the dropped
    singular values.
    """
    r = check_order(r, sys.n, allow_full=True)
    wc, wo = standard_gramians(sys)
    t, tinv, sigma, _ = balance_gramians(wc, wo)
    reduced = leading_block(sys.transformed(t, tinv), r)
    stable = is_hurwitz(reduced).stable
    warnings = () if stable else ("reduced system is not Hurwitz",)
    return ReductionResult(
        reduced=reduced,
        method="fibt",
        order=r,
        bounds={"ef": 2.0 * float(np.sum(sigma[r:]))},
        stable=stable,
        sigma=tuple(float(s) for s in sigma),
        warnings=warnings,
    )


def gspa_reduce(sys: StateSpace, r: int, rho: float = 0.0) -> ReductionResult:
    """Balanced residualization with an adjustable matching point rho >= 0.

    The dropped balanced states are folded back through (rho I - A22)^(-1)
    instead of being discarded. rho = 0 matches the response exactly at
    zero frequency and inherits the 2*tail bound; rho -> inf recovers plain
    truncation. Intermediate rho carries no published bound, so none is
    attached there.
    """
    r = check_order(r, sys.n, allow_full=True)
    rho = float(rho)
    if not (math.isfinite(rho) and rho >= 0.0):
        raise InvalidParameters("rho must be finite and >= 0")
    wc, wo = standard_gramians(sys)
    t, tinv, sigma, _ = balance_gramians(wc, wo)
    bal = sys.transformed(t, tinv)
    a11, a12, a21, a22, b1, b2, c1, c2 = partition(bal, r)

    k = a22.shape[0]
    shifted = rho * np.eye(k, dtype=complex) - a22
    if k:
        sv = np.linalg.svd(shifted, compute_uv=False)
        if sv[0] == 0.0 or sv[-1] <= k * np.finfo(float).eps * sv[0]:
            raise SingularResidualization(
                f"rho I - A22 is numerically singular at rho = {rho}"
            )
    fold_a = np.linalg.solve(shifted, a21)
    fold_b = np.linalg.solve(shifted, b2)
    reduced = StateSpace(
        a11 + a12 @ fold_a,
        b1 + a12 @ fold_b,
        c1 + c2 @ fold_a,
        bal.D + c2 @ fold_b,
    )
    stable = is_hurwitz(reduced).stable
    warnings = () if stable else ("reduced system is not Hurwitz",)
    bounds = {}
    if rho == 0.0:
        bounds["ef"] = 2.0 * float(np.sum(sigma[r:]))
    return ReductionResult(
        reduced=reduced,
        method="gspa",
        order=r,
        bounds=bounds,
        stable=stable,
        sigma=tuple(float(s) for s in sigma),
        warnings=warnings,
    )


def _band_primitive(a: np.ndarray, w1: float, w2: float) -> np.ndarray:
    """(1/2pi) integral over [w1, w2] of (j nu I - A)^(-1) d nu, closed form."""
    n = a.shape[0]
    eye = np.eye(n, dtype=complex)
    return (
        1j
        / (2.0 * math.pi)
        * (log_principal(1j * w1 * eye - a) - log_principal(1j * w2 * eye - a))
    )


def band_gramians(sys: StateSpace, w1: float, w2: float):
    """Frequency-limited Gramian pair restricted to a band.

    The band is taken literally when it straddles zero, and as the union
    with its mirror image when it lies on one side (the classical
    real-system convention: energy at -w belongs with energy at +w). The
    closed form uses the principal matrix logarithm; for a band [x1, x2]
        S = (j/2pi) (log(j x1 I - A) - log(j x2 I - A))
        Wc_band = S Wc + Wc S*,   Wo_band = S* Wo + Wo S.
    Either Gramian may come out indefinite; that is reported as
    IndefiniteGramian, not repaired.
    """
    w1, w2 = float(w1), float(w2)
    if not (math.isfinite(w1) and math.isfinite(w2) and w1 < w2):
        raise InvalidParameters("band needs finite w1 < w2")
    wc, wo = standard_gramians(sys)
    if w1 <= 0.0 <= w2:
        pieces = [(w1, w2)]
    else:
        lo, hi = sorted((abs(w1), abs(w2)))
        pieces = [(-hi, -lo), (lo, hi)]
    s = sum(_band_primitive(sys.A, x1, x2) for (x1, x2) in pieces)
    wc_band = hermitize(s @ wc + wc @ s.conj().T)
    wo_band = hermitize(s.conj().T @ wo + wo @ s)
    for name, w in (("controllability", wc_band), ("observability", wo_band)):
        evals = np.linalg.eigvalsh(w)
        scale = max(float(np.max(np.abs(evals))) if evals.size else 0.0, 1e-14)
        if evals.size and float(np.min(evals)) < -1e-8 * scale:
            raise IndefiniteGramian(
                f"band-limited {name} Gramian is indefinite "
                f"(min eigenvalue {float(np.min(evals)):.3e})"
            )
    return wc_band, wo_band


def fgbt_reduce(sys: StateSpace, r: int, w1: float, w2: float) -> ReductionResult:
    """Balanced truncation on band-limited Gramians.

    No error bound exists for this scheme, and neither stability of the
    reduced model nor positive semidefiniteness of the Gramians is
    guaranteed; indefinite Gramians raise IndefiniteGramian.
    """
    r = check_order(r, sys.n, allow_full=True)
    wc_band, wo_band = band_gramians(sys, w1, w2)
    t, tinv, sigma, _ = balance_gramians(wc_band, wo_band)
    reduced = leading_block(sys.transformed(t, tinv), r)
    stable = is_hurwitz(reduced).stable
    warnings = ("no error bound available for band-limited Gramian truncation",)
    if not stable:
        warnings += ("reduced system is not Hurwitz",)
    return ReductionResult(
        reduced=reduced,
        method="fgbt",
        order=r,
        bounds={},
        stable=stable,
        sigma=tuple(float(s) for s in sigma),
        warnings=warnings,
    )
