"""Fast oracle checks run by ``fbl-bounds selftest``.

Each check returns (passed, detail). The suite finishes in a few seconds and
touches every numerical layer once.
"""

from __future__ import annotations

import logging
import math
from typing import Callable, Dict, List, Tuple

import numpy as np

from .channels.awgn import awgn_alpha, awgn_saddle_closed_form
from .channels.biawgn import biawgn_capacity, biawgn_capacity_from_transform, h_transform
from .channels.bsc import bsc_exact_fa_md, bsc_g0, bsc_g2, bsc_integral_fa_md, bsc_series_coeffs
from .laplace import find_saddle, series_sqrt_invert
from .specfun import bernoulli_table, gauss_q, gauss_q_inv
from .specs import BiAwgnSpec, BscSpec, awgn_spec

logger = logging.getLogger(__name__)

Check = Callable[[], Tuple[bool, str]]


def _gauss_q() -> Tuple[bool, str]:
    p = 1e-3
    back = gauss_q(gauss_q_inv(p))
    ok = abs(back - p) <= 1e-12 * p and gauss_q(0.0) == 0.5
    return ok, f"Q(Qinv(1e-3))={back:.15g}"


def _bernoulli() -> Tuple[bool, str]:
    table = bernoulli_table(4)
    expected = (1.0, 1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0)
    ok = all(abs(table.b2k(k) - v) < 1e-15 for k, v in enumerate(expected))
    return ok, f"B2..B8={table.values[1:]}"


def _bsc_integral() -> Tuple[bool, str]:
    spec = BscSpec(0.11)
    exact = bsc_exact_fa_md(10, 4, spec)
    integral = bsc_integral_fa_md(10, 4, spec)
    ok = all(abs(a - b) <= 1e-9 * abs(a) for a, b in zip(exact, integral))
    ok = ok and abs(math.exp(exact[0]) - 0.376953125) < 1e-12
    return ok, f"exact={exact} integral={integral}"


def _awgn_saddle() -> Tuple[bool, str]:
    spec, lam = awgn_spec(1.0), 0.7
    numeric = find_saddle(awgn_alpha(spec, lam)).s_star
    closed = awgn_saddle_closed_form(1.0, lam)
    return abs(numeric - closed) <= 1e-10, f"numeric={numeric:.12g} closed={closed:.12g}"


def _sqrt_recomposition() -> Tuple[bool, str]:
    spec, lam = awgn_spec(1.0), 0.7
    kernel = awgn_alpha(spec, lam)
    s_star = find_saddle(kernel).s_star
    a = kernel.taylor(s_star, 6)
    f = series_sqrt_invert(a)
    square = np.convolve(f, f)
    err = max(abs(square[m] + a[m]) for m in range(2, len(a)))
    return err <= 1e-12, f"max |f^2 + a|={err:.3e}"


def _bsc_series() -> Tuple[bool, str]:
    spec, lam = BscSpec(0.11), 0.3
    worst = 0.0
    for branch, q in (("fa", 0.0), ("md", spec.delta0)):
        c = bsc_series_coeffs(lam, spec, branch)
        g0, g2 = bsc_g0(lam, q), bsc_g2(lam, q)
        worst = max(worst, abs(c[0] - 1j * g0) / abs(g0), abs(c[2] / c[0] + g2) / abs(g2))
    return worst <= 1e-12, f"max relative error={worst:.3e}"


def _biawgn_transform() -> Tuple[bool, str]:
    spec = BiAwgnSpec(1.0)
    h0 = float(h_transform(0.0, 0, spec))
    h_minus = float(h_transform(-1.0, 0, spec))
    cap_gap = abs(biawgn_capacity(spec) - biawgn_capacity_from_transform(spec))
    ok = abs(h0 - 1.0) < 1e-12 and abs(h_minus - 2.0) < 1e-9 and cap_gap < 1e-9
    return ok, f"H(0)={h0:.12g} H(-1)={h_minus:.12g} capacity gap={cap_gap:.3e}"


CHECKS: Dict[str, Check] = {
    "gauss_q": _gauss_q,
    "bernoulli": _bernoulli,
    "bsc_integral": _bsc_integral,
    "awgn_saddle": _awgn_saddle,
    "sqrt_recomposition": _sqrt_recomposition,
    "bsc_series": _bsc_series,
    "biawgn_transform": _biawgn_transform,
}


def run_selftest() -> Dict[str, object]:
    results: List[Dict[str, object]] = []
    for name, check in CHECKS.items():
        try:
            passed, detail = check()
        except Exception as exc:  # report, do not abort the suite
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        logger.info("[selftest] %s passed=%s %s", name, passed, detail)
        results.append({"name": name, "passed": bool(passed), "detail": detail})
    return {"passed": all(r["passed"] for r in results), "checks": results}
