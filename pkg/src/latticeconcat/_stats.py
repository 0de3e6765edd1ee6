from __future__ import annotations

import numpy as np
from scipy import stats


def wilson_interval(errors: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    if trials < 1:
        raise ValueError("need at least one trial")
    ci = stats.binomtest(int(errors), int(trials)).proportion_ci(confidence, method="wilson")
    return float(ci.low), float(ci.high)


def loglog_slope(x, y) -> float:
    """Least-squares slope of log(y) against log(x)."""
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def log_slope(x, y) -> float:
    """Least-squares slope of log(y) against x."""
    return float(np.polyfit(np.asarray(x, float), np.log(y), 1)[0])
