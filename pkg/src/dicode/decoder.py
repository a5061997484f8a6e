"""Ball-membership identification verifiers.

A verifier for identity i asks one question: does the received block lie
in a ball around the expected (faded) codeword?  With channel state
information the ball center uses the realized fading; without it the
center is c*u with c = E h, and the fading spread is absorbed into the
threshold.  Thresholds are always

    tau = E xi + sqrt(Var xi * ln n)

with xi the genuine squared distance statistic and ln the natural log;
Chebyshev then caps the miss probability by 1/ln n.  Squared-radius
units throughout, and the boundary point xi = tau accepts.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .fading import FadingMoments

ACCEPT = "accept"
REJECT = "reject"
OUTAGE = "outage"


@dataclass(frozen=True)
class DecisionStatistic:
    statistic: float
    threshold: float
    verdict: str


def _decide(stat: float, threshold: float) -> DecisionStatistic:
    return DecisionStatistic(stat, threshold, ACCEPT if stat <= threshold else REJECT)


def threshold_csi(n: int, sigma2: float, deviation_scale: float = 1.0) -> float:
    """Ball threshold with CSI: n sigma^2 + sqrt(2 n sigma^4 ln n).

    The genuine statistic is ||z||^2 with E = n sigma^2 and
    Var = 2 n sigma^4.  deviation_scale multiplies the deviation term
    only; it exists for sensitivity studies and defaults to 1.
    """
    if n < 2:
        raise ValueError("block length must be >= 2 so ln n > 0")
    if sigma2 < 0:
        raise ValueError("noise variance must be nonnegative")
    return n * sigma2 + deviation_scale * sigma2 * math.sqrt(2 * n * math.log(n))


def verify_csi_fast(
    y: np.ndarray,
    u: np.ndarray,
    h: np.ndarray,
    sigma2: float,
    deviation_scale: float = 1.0,
) -> DecisionStatistic:
    """Per-coordinate CSI: center the ball at h * u elementwise."""
    y = np.asarray(y, dtype=float)
    u = np.asarray(u, dtype=float)
    h = np.asarray(h, dtype=float)
    if y.shape != u.shape or h.shape != u.shape:
        raise ValueError("y, u and h must share one shape")
    stat = float(np.sum((y - h * u) ** 2))
    return _decide(stat, threshold_csi(y.size, sigma2, deviation_scale))


def verify_csi_slow(
    y: np.ndarray,
    u: np.ndarray,
    h: float,
    sigma2: float,
    outage_threshold: float,
    deviation_scale: float = 1.0,
) -> DecisionStatistic:
    """Block CSI with an outage rule: |h| below the radius means no verdict.

    For non-outage states the ball center is h*u, which reduces the
    statistic to the plain AWGN one, so the AWGN threshold applies
    unchanged.
    """
    y = np.asarray(y, dtype=float)
    u = np.asarray(u, dtype=float)
    if y.shape != u.shape:
        raise ValueError("y and u must share one shape")
    if abs(h) < outage_threshold:
        return DecisionStatistic(math.nan, threshold_csi(y.size, sigma2, deviation_scale), OUTAGE)
    stat = float(np.sum((y - h * u) ** 2))
    return _decide(stat, threshold_csi(y.size, sigma2, deviation_scale))


def impostor_moments(
    u: np.ndarray,
    u_sent: np.ndarray,
    sigma2: float,
    m: FadingMoments,
    mode: str,
) -> tuple[float, float]:
    """Mean and variance of the verifier statistic when u_sent was
    transmitted and identity u is being verified (fast fading).

    With u_sent == u these are exactly the genuine-statistic moments.
    mode "csi" centers at h*u; mode "nocsi" centers at c*u.
    """
    u = np.asarray(u, dtype=float)
    u_sent = np.asarray(u_sent, dtype=float)
    if u.shape != u_sent.shape:
        raise ValueError("codewords must share one shape")
    n = u.size
    diff = u_sent - u
    d2 = float(np.sum(diff**2))
    if mode == "csi":
        d4 = float(np.sum(diff**4))
        mean = n * sigma2 + m.e2 * d2
        var = 2 * n * sigma2**2 + 4 * sigma2 * m.e2 * d2 + m.var_sq * d4
        return mean, var
    if mode == "nocsi":
        s2 = float(np.sum(u_sent**2))
        s4 = float(np.sum(u_sent**4))
        c = m.c
        mean = n * sigma2 + m.variance * s2 + c * c * d2
        var = (
            2 * n * sigma2**2
            + 4 * sigma2 * m.variance * s2
            + 4 * sigma2 * c * c * d2
            + s4 * m.var_centered_sq
            + 4 * m.cm3 * c * float(np.sum(u_sent**3 * diff))
            + 4 * c * c * m.variance * float(np.sum(u_sent**2 * diff**2))
        )
        return mean, var
    raise ValueError(f"mode must be 'csi' or 'nocsi', got {mode!r}")


def nocsi_threshold(
    u: np.ndarray,
    sigma2: float,
    m: FadingMoments,
    deviation_scale: float = 1.0,
) -> float:
    """Threshold for the CSI-free verifier of codeword u.

    Genuine statistic xi = ||y - c u||^2 has
      E xi   = n sigma^2 + Var h ||u||_2^2
      Var xi = 2 n sigma^4 + 4 sigma^2 Var h ||u||_2^2
               + ||u||_4^4 Var((h-c)^2)
    and tau = E xi + sqrt(Var xi ln n).
    """
    u = np.asarray(u, dtype=float)
    if u.size < 2:
        raise ValueError("block length must be >= 2 so ln n > 0")
    mean, var = impostor_moments(u, u, sigma2, m, "nocsi")
    return mean + deviation_scale * math.sqrt(var * math.log(u.size))


def verify_nocsi(
    y: np.ndarray,
    u: np.ndarray,
    sigma2: float,
    m: FadingMoments,
    deviation_scale: float = 1.0,
) -> DecisionStatistic:
    """CSI-free verifier: ball centered at (E h) * u.

    Only meaningful when E h != 0; a zero-mean law collapses all centers
    to the origin and identities become indistinguishable, so that case
    warns.
    """
    y = np.asarray(y, dtype=float)
    u = np.asarray(u, dtype=float)
    if y.shape != u.shape:
        raise ValueError("y and u must share one shape")
    if m.c == 0.0:
        warnings.warn(
            "fading mean is zero: CSI-free centers coincide and identities "
            "cannot be separated",
            RuntimeWarning,
            stacklevel=2,
        )
    stat = float(np.sum((y - m.c * u) ** 2))
    return _decide(stat, nocsi_threshold(u, sigma2, m, deviation_scale))


# -- verifier specs: small dispatch objects the harness drives


@dataclass(frozen=True)
class CsiFast:
    sigma2: float
    deviation_scale: float = 1.0

    def verify(self, y, u, h) -> DecisionStatistic:
        if h is None:
            h = np.ones_like(np.asarray(u, dtype=float))
        elif np.ndim(h) == 0:
            h = np.full(np.asarray(u).size, float(h))
        return verify_csi_fast(y, u, h, self.sigma2, self.deviation_scale)


@dataclass(frozen=True)
class CsiSlow:
    sigma2: float
    outage_threshold: float
    deviation_scale: float = 1.0

    def verify(self, y, u, h) -> DecisionStatistic:
        return verify_csi_slow(y, u, float(h), self.sigma2, self.outage_threshold, self.deviation_scale)


@dataclass(frozen=True)
class NoCsi:
    sigma2: float
    moments: FadingMoments
    deviation_scale: float = 1.0

    def verify(self, y, u, h) -> DecisionStatistic:
        # h is deliberately ignored: that is the point of this verifier
        return verify_nocsi(y, u, self.sigma2, self.moments, self.deviation_scale)


VerifierSpec = CsiFast | CsiSlow | NoCsi
