"""Seeded model factories shared across test modules."""

import numpy as np

from fdbt import StateSpace


def random_stable(seed, n, m=1, p=1, complex_entries=False, margin=0.3):
    """A Hurwitz system with standard-normal entries, spectrum shifted left."""
    rng = np.random.default_rng(seed)

    def mat(rows, cols):
        x = rng.standard_normal((rows, cols))
        if complex_entries:
            x = x + 1j * rng.standard_normal((rows, cols))
        return x

    a = mat(n, n)
    a = a - (np.max(np.linalg.eigvals(a).real) + margin) * np.eye(n)
    return StateSpace(a, mat(n, m), mat(p, n), mat(p, m))


def random_unstable(seed, n, m=1, p=1, lift=0.5):
    """A system whose rightmost eigenvalue sits at +lift."""
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((n, n))
    a = a + (lift - np.max(np.linalg.eigvals(a).real)) * np.eye(n)
    return StateSpace(
        a, rng.standard_normal((n, m)), rng.standard_normal((p, n)),
        rng.standard_normal((p, m)),
    )


def well_conditioned_transform(seed, n, cond_cap=50.0):
    """Random invertible T with singular values spread below cond_cap."""
    rng = np.random.default_rng(seed)
    q1, _ = np.linalg.qr(rng.standard_normal((n, n)))
    q2, _ = np.linalg.qr(rng.standard_normal((n, n)))
    sv = np.geomspace(1.0, cond_cap, n)
    t = q1 @ np.diag(sv) @ q2
    return t, np.linalg.inv(t)


def response_gap(sys_a, sys_b, omegas):
    """sup over omegas of sigma_max(Ga(jw) - Gb(jw)), raw numpy path."""
    worst = 0.0
    for w in omegas:
        ra = _resp(sys_a, 1j * float(w))
        rb = _resp(sys_b, 1j * float(w))
        worst = max(worst, float(np.linalg.svd(ra - rb, compute_uv=False)[0]))
    return worst


def _resp(sys, s):
    if sys.n == 0:
        return np.asarray(sys.D, dtype=complex)
    r = np.linalg.solve(s * np.eye(sys.n) - sys.A, sys.B)
    return sys.C @ r + sys.D
