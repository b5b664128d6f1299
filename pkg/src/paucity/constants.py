"""Constants behind every predicted main term, plus the main terms themselves.

G (Catalan) comes from the alternating series sum (-1)^k/(2k+1)^2 with
pairwise term grouping; K (Landau-Ramanujan) from either Euler product form,
evaluated in log space with an explicit tail bound.  Predicted main terms and
normalizations for each reported statistic live here so that every CSV row is
recomputable from this module alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .sieve import sieve_primes

_CACHE: dict[tuple, "ConstantValue"] = {}


@dataclass(frozen=True)
class ConstantValue:
    """A computed constant with a rigorous error bound and the method used."""

    name: str
    value: float
    error_bound: float
    method: str

    def __post_init__(self) -> None:
        if not self.error_bound > 0:
            raise ValidationError(f"error_bound must be positive, got {self.error_bound}")


def catalan(eps: float = 1e-10) -> ConstantValue:
    """Catalan's constant G = sum_{k>=0} (-1)^k / (2k+1)^2 to within eps.

    Consecutive alternating terms are grouped in pairs
    g_j = 1/(4j+1)^2 - 1/(4j+3)^2 (all positive), summed exactly with
    math.fsum; truncation error after J pairs is below the first omitted
    term 1/(4J+1)^2 <= eps.
    """
    if not (1e-15 <= eps < 1.0):
        raise ValidationError(f"catalan needs 1e-15 <= eps < 1, got {eps}")
    key = ("catalan", eps)
    if key in _CACHE:
        return _CACHE[key]
    pairs = int(math.ceil((1.0 / math.sqrt(eps) - 1.0) / 4.0)) + 1
    value = math.fsum(
        1.0 / (4 * j + 1) ** 2 - 1.0 / (4 * j + 3) ** 2 for j in range(pairs)
    )
    bound = 1.0 / (4 * pairs + 1) ** 2 + 1e-15
    out = ConstantValue("G", value, bound, f"alternating-series-pairs:{pairs}")
    _CACHE[key] = out
    return out


def landau_ramanujan(prime_limit: int = 10**7, form: str = "1mod4") -> ConstantValue:
    """Landau-Ramanujan constant K via an Euler product over primes <= prime_limit.

    form="1mod4": K = (pi/4) * prod_{p=1(4)} (1 - p^-2)^(1/2)
    form="3mod4": K = 2^(-1/2) * prod_{p=3(4)} (1 - p^-2)^(-1/2)

    Both are evaluated as exp of a compensated log sum; the truncated tail of
    sum_{p>P} |log(1 - p^-2)|/2 is below 1/(P-1), which bounds the error.
    """
    if prime_limit < 10**3:
        raise ValidationError(f"prime_limit must be >= 1000, got {prime_limit}")
    if form not in ("1mod4", "3mod4"):
        raise ValidationError(f"unknown product form {form!r}")
    key = ("landau_ramanujan", prime_limit, form)
    if key in _CACHE:
        return _CACHE[key]
    p = sieve_primes(prime_limit).primes
    if form == "1mod4":
        sel = p[p & 3 == 1].astype(np.float64)
        logsum = math.fsum(np.log1p(-1.0 / (sel * sel)))
        value = (math.pi / 4.0) * math.exp(0.5 * logsum)
    else:
        sel = p[p & 3 == 3].astype(np.float64)
        logsum = math.fsum(np.log1p(-1.0 / (sel * sel)))
        value = math.exp(-0.5 * logsum) / math.sqrt(2.0)
    bound = 1.0 / (prime_limit - 1)
    out = ConstantValue("K", value, bound, f"euler-product-{form}:{prime_limit}")
    _CACHE[key] = out
    return out


def sieve_density_product(z: float) -> ConstantValue:
    """V(z) = prod_{2 < p < z} (1 - (3p-2)/p^2), evaluated in log space."""
    if z < 3:
        raise ValidationError(f"sieve_density_product needs z >= 3, got {z}")
    key = ("V", float(z))
    if key in _CACHE:
        return _CACHE[key]
    pmax = int(math.floor(z))
    if float(z).is_integer():
        pmax -= 1
    p = sieve_primes(max(pmax, 2)).primes
    p = p[p > 2].astype(np.float64)
    p = p[p < z]
    logsum = math.fsum(np.log1p(-(3.0 * p - 2.0) / (p * p)))
    value = math.exp(logsum)
    bound = max(abs(value), 1.0) * 1e-12 * max(p.size, 1)
    out = ConstantValue(f"V({z:g})", value, bound, f"log-space-product:{p.size}")
    _CACHE[key] = out
    return out


# statistic -> (normalization label, predicted limit constant or None)
_PI = math.pi


def _constant_table() -> dict[str, tuple[str, float | None]]:
    g = catalan().value
    k = landau_ramanujan().value
    return {
        "S01": ("S/x", 0.5),
        "S02": ("S*log(x)/x", 12.0 * g / _PI**2),
        "S11": ("S*log(x)/x", _PI / 2.0 + 9.0 / 4.0),
        "S22": ("S*log(x)^2/x", 2.0 * _PI),
        "M1": ("S*log(x)/x", _PI / 2.0),
        "M2": ("S*log(x)^2/x", _PI),
        "R2CUBE": ("S*log(x)^2/x", 4.0 * _PI),
        "SUPP1": ("S*log(x)/x", _PI / 2.0),
        "SUPP2": ("S*log(x)^2/x", _PI / 2.0),
        "LANDAU_B": ("S*sqrt(log(x))/x", k),
        "COUNT_A": ("S*sqrt(log(x))/x", 1.0 / (4.0 * k)),
        "LEMMA31": ("S/log(x)", 1.0 / _PI),
        "LEMMA32": ("S/log(x)", 12.0 * g / _PI**3),
        "S00": ("(S - x*log(x)/4)*4/x", None),
        "S12": ("S*log(x)^2/x", None),
        "DISPERSION": ("S*log(x)/x", None),
    }


def known_statistics() -> tuple[str, ...]:
    return tuple(_constant_table())


def _base_statistic(statistic: str) -> str:
    # DISPERSION carries its parameter in the identifier, e.g. DISPERSION(c=1).
    return "DISPERSION" if statistic.startswith("DISPERSION") else statistic


def predicted_constant(statistic: str) -> float | None:
    """Limit constant of the normalized statistic, or None where no limit is claimed."""
    table = _constant_table()
    base = _base_statistic(statistic)
    if base not in table:
        raise ValidationError(f"unknown statistic {statistic!r}")
    return table[base][1]


def normalization_label(statistic: str) -> str:
    table = _constant_table()
    base = _base_statistic(statistic)
    if base not in table:
        raise ValidationError(f"unknown statistic {statistic!r}")
    return table[base][0]


def normalized_value(statistic: str, x: int, raw: float) -> float:
    """Rescale a raw partial sum to the quantity that should converge."""
    if x < 3:
        raise ValidationError(f"normalization needs x >= 3, got {x}")
    base = _base_statistic(statistic)
    lx = math.log(x)
    if base == "S01":
        return raw / x
    if base in ("S02", "S11", "M1", "SUPP1", "DISPERSION"):
        return raw * lx / x
    if base in ("S22", "M2", "R2CUBE", "SUPP2", "S12"):
        return raw * lx * lx / x
    if base in ("LANDAU_B", "COUNT_A"):
        return raw * math.sqrt(lx) / x
    if base in ("LEMMA31", "LEMMA32"):
        return raw / lx
    if base == "S00":
        return (raw - x * lx / 4.0) * 4.0 / x
    raise ValidationError(f"unknown statistic {statistic!r}")


def predicted_main_term(statistic: str, x: float) -> float:
    """Predicted main term at x for the statistics with a proven constant.

    Raises ValidationError for statistics whose constant the source material
    leaves unspecified (S00, S12, DISPERSION) and for unknown identifiers.
    """
    if x < 3:
        raise ValidationError(f"predicted_main_term needs x >= 3, got {x}")
    base = _base_statistic(statistic)
    const = predicted_constant(base)
    if const is None:
        raise ValidationError(f"no predicted constant for {statistic!r}")
    lx = math.log(x)
    if base == "S01":
        return const * x
    if base in ("S02", "S11", "M1", "SUPP1"):
        return const * x / lx
    if base in ("S22", "M2", "R2CUBE", "SUPP2"):
        return const * x / (lx * lx)
    if base in ("LANDAU_B", "COUNT_A"):
        return const * x / math.sqrt(lx)
    if base in ("LEMMA31", "LEMMA32"):
        return const * lx
    raise ValidationError(f"unknown statistic {statistic!r}")
