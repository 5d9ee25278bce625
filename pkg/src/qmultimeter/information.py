"""Average information carried by a two-outcome measurement with equal priors."""
from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class InfoReport:
    f_par: float
    f_perp: float
    r_par: float
    r_perp: float
    p_par: float
    p_perp: float
    info_bits: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def xlog2x(x: float) -> float:
    return 0.0 if x <= 0.0 else x * math.log2(x)


def _bit_information(p: float) -> float:
    return 1.0 + xlog2x(p) + xlog2x(1.0 - p)


ROUNDOFF = 1e-12


def _checked(name: str, f: float) -> float:
    if math.isnan(f) or not (-ROUNDOFF <= f <= 1.0 + ROUNDOFF):
        raise ValueError(f"{name}={f} outside [0, 1]")
    return min(max(f, 0.0), 1.0)


def info_from_fidelities(f_par: float, f_perp: float) -> InfoReport:
    """Information per bit when Bob reads Alice's bit with the given fidelities.

    ``r_i`` is the fraction of results of type ``i`` and ``p_i`` the chance
    that such a result names the bit correctly. A result type that never
    occurs gets ``p_i = 1/2``; it carries zero weight either way.
    """
    f_par = _checked("f_par", float(f_par))
    f_perp = _checked("f_perp", float(f_perp))
    r_par = (f_par + (1.0 - f_perp)) / 2.0
    r_perp = (f_perp + (1.0 - f_par)) / 2.0
    p_par = f_par / (2.0 * r_par) if r_par > 0 else 0.5
    p_perp = f_perp / (2.0 * r_perp) if r_perp > 0 else 0.5
    # guard roundoff at the corners, e.g. f_par = 1 gives p_perp = 1 + 1 ulp
    p_par = min(max(p_par, 0.0), 1.0)
    p_perp = min(max(p_perp, 0.0), 1.0)
    info = r_par * _bit_information(p_par) + r_perp * _bit_information(p_perp)
    return InfoReport(f_par, f_perp, r_par, r_perp, p_par, p_perp, info)
