"""Power-law fits and bound-style ratio checks for sampled time series."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

MODELS = ("pure-power", "log-corrected", "log-growth")
MIN_SAMPLES = 16


@dataclass(frozen=True)
class RateFit:
    model: str
    window: tuple[float, float]
    p: float
    C: float
    r2: float
    sup_ratio: float


@dataclass(frozen=True)
class RatioCheck:
    sup: float
    argmax_t: float
    trend: float  # slope of log(ratio) per octave over the last octave of the window


def _window(t, y, window):
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    t0, t1 = map(float, window)
    if t0 < math.e:
        raise ValueError(f"window start {t0} must be >= e so that log t >= 1")
    if not t1 > 2 * t0:
        raise ValueError(f"window [{t0}, {t1}] is shorter than one octave")
    sel = (t >= t0) & (t <= t1)
    if sel.sum() < MIN_SAMPLES:
        raise ValueError(f"window [{t0}, {t1}] holds {int(sel.sum())} samples, need >= {MIN_SAMPLES}")
    tw, yw = t[sel], y[sel]
    if np.any(yw <= 0):
        bad = tw[np.argmax(yw <= 0)]
        raise ValueError(f"nonpositive value in window at t={bad:.6g}")
    return tw, yw


def _r2(obs, pred):
    ss_res = float(np.sum((obs - pred) ** 2))
    ss_tot = float(np.sum((obs - obs.mean()) ** 2))
    if ss_tot == 0.0:
        return 1.0 if ss_res == 0.0 else 0.0
    return min(1.0, max(0.0, 1.0 - ss_res / ss_tot))


def _correction(model: str, t):
    return np.log(t) if model in ("log-corrected", "log-growth") else np.ones_like(t)


def fit(t, y, model: str = "pure-power", window=(20.0, 100.0), p_target: float | None = None) -> RateFit:
    """Least-squares fit of ``y ≈ C t^-p`` (times ``log t`` for log-corrected) or ``y ≈ C log t``.

    ``sup_ratio`` is ``sup y t^p_target / correction`` over the window, with
    ``p_target`` defaulting to the fitted exponent (0 for log-growth).
    """
    if model not in MODELS:
        raise ValueError(f"unknown model {model!r}; expected one of {MODELS}")
    tw, yw = _window(t, y, window)
    lt = np.log(tw)
    if model == "log-growth":
        # one-parameter fit through the origin
        c = float(np.dot(lt, yw) / np.dot(lt, lt))
        p, C = 0.0, c
        r2 = _r2(yw, c * lt)
    else:
        z = np.log(yw)
        if model == "log-corrected":
            z = z - np.log(lt)
        A = np.column_stack([np.ones_like(lt), -lt])
        (logC, p), *_ = np.linalg.lstsq(A, z, rcond=None)
        p, C = float(p), float(np.exp(logC))
        r2 = _r2(z, logC - p * lt)
    pt = p if p_target is None else p_target
    sup = float(np.max(yw * tw**pt / _correction(model, tw)))
    return RateFit(model, (float(window[0]), float(window[1])), p, C, r2, sup)


def bounded_ratio_check(t, y, p_target: float, correction: str = "1", window=(20.0, 100.0)) -> RatioCheck:
    """Sup and late-time trend of ``y t^p_target / c(t)`` with ``c = 1`` or ``log t``."""
    if correction not in ("1", "log"):
        raise ValueError("correction must be '1' or 'log'")
    tw, yw = _window(t, y, window)
    ratio = yw * tw**p_target
    if correction == "log":
        ratio = ratio / np.log(tw)
    i = int(np.argmax(ratio))
    last = tw >= tw[-1] / 2
    x = np.log2(tw[last])
    if len(x) >= 2 and np.ptp(x) > 0:
        trend = float(np.polyfit(x, np.log(ratio[last]), 1)[0])
    else:
        trend = 0.0
    return RatioCheck(float(ratio[i]), float(tw[i]), trend)


def relative_variation(t, y, window) -> tuple[float, float]:
    """``(mean, (max - min)/mean)`` of ``y / log t`` over the window."""
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    sel = (t >= window[0]) & (t <= window[1])
    if not sel.any():
        raise ValueError("no samples in window")
    q = y[sel] / np.log(t[sel])
    level = float(q.mean())
    return level, float(np.ptp(q) / level) if level != 0 else math.inf
