"""Geological learning from first-stage outcomes.

All functions broadcast: ``xi`` may be a single scenario ``(I,)`` or a
stack ``(S, I)``, and trigger/link matrices are ``(J, I)``.
"""

from __future__ import annotations

import numpy as np
from scipy.special import expit, logit

from .domain import DomainError


def eligibility(x, xi, success, failure, unconditional) -> np.ndarray:
    """Trigger condition: any selected success-trigger that succeeded, failure-trigger
    that failed, or unconditional trigger makes the recourse project eligible."""
    x = np.asarray(x, dtype=bool)
    xi = np.asarray(xi, dtype=bool)
    fired_s = x & xi
    fired_f = x & ~xi
    count = (
        fired_s.astype(np.int64) @ np.asarray(success, dtype=np.int64).T
        + fired_f.astype(np.int64) @ np.asarray(failure, dtype=np.int64).T
        + (x.astype(np.int64) @ np.asarray(unconditional, dtype=np.int64).T)
    )
    return count >= 1


def evidence(x, xi, theta) -> np.ndarray:
    """Net log-odds evidence ``sum_i theta_ij x_i (2 xi_i - 1)``; unselected projects add nothing."""
    signed = np.asarray(x, dtype=float) * (2.0 * np.asarray(xi, dtype=float) - 1.0)
    return signed @ np.asarray(theta, dtype=float).T


def posterior(p0, delta, bounds=(0.01, 0.99)):
    """Logit-shifted prior, hard-projected onto ``bounds``."""
    p0 = np.asarray(p0, dtype=float)
    if np.any((p0 <= 0) | (p0 >= 1)):
        raise DomainError("prior probability must lie strictly inside (0, 1)")
    lo, hi = bounds
    delta = np.asarray(delta, dtype=float)
    # zero evidence returns the prior exactly, not its logit round trip
    out = np.clip(np.where(delta == 0, p0, expit(logit(p0) + delta)), lo, hi)
    return out if np.ndim(out) else float(out)


def realize_second_stage(p, u):
    """Second-stage success ``U <= p`` on the common uniforms."""
    out = np.asarray(u) <= np.asarray(p)
    return out if np.ndim(out) else bool(out)
