"""P_Sigma: exact lower approximations of the time-bounded halting probability."""
from dataclasses import dataclass

import pandas as pd

from subrecursive.codec import candidate_mass, valid_count, valid_programs
from subrecursive.config import get_capacity
from subrecursive.dyadic import Dyadic
from subrecursive.errors import CapacityError
from subrecursive.log import get_logger
from subrecursive.memo import MEMO
from subrecursive.submachine import evaluate
from subrecursive.vm import COSTS, Meter

__all__ = [
    "Certificate",
    "Dyadic",
    "OmegaApprox",
    "StratumSummary",
    "certify",
    "charge_stratum",
    "omega_frame",
    "omega_table",
    "psum",
    "psum_metered",
    "stratum",
]

logger = get_logger(__name__)

# least cost of one evaluation record: (1 + tb_steps) + (1 + steps), both >= 1
_EVAL_FLOOR = 2 * COSTS["inner_run"] + 2


def check_capacity(size):
    capacity = get_capacity()
    if size > capacity:
        raise CapacityError(f"size {size} exceeds enumeration capacity {capacity}")


@dataclass(frozen=True)
class StratumSummary:
    size: int
    valid: int
    halting: int
    best_numeric: int
    best_program: str
    cost: int

    @property
    def mass(self):
        return Dyadic(self.halting, self.size)


def _summarize(tf, size):
    valid = halting = cost = 0
    best, best_program = -1, None
    for p in valid_programs(size):
        ev = evaluate(tf, p)
        valid += 1
        cost += ev.cost
        if ev.halted:
            halting += 1
            cost += COSTS["halter"]
        if ev.numeric > best:
            best, best_program = ev.numeric, p
    logger.debug("stratum %s size=%d valid=%d halting=%d", tf.spec, size, valid, halting)
    return StratumSummary(size, valid, halting, max(best, 0), best_program, cost)


def stratum(tf, size):
    """Summary of every valid program of exactly ``size`` bits under tf."""
    check_capacity(size)
    return MEMO.get_or_compute(("stratum", tf.spec, size), lambda: _summarize(tf, size))


def charge_stratum(tf, size, meter):
    """Charge a stratum to ``meter``, failing before any work when the meter
    cannot pay even one minimal evaluation per valid program."""
    check_capacity(size)
    remaining = meter.remaining
    if remaining is not None and _EVAL_FLOOR * valid_count(size) > remaining:
        meter.charge(remaining + 1)
    summary = stratum(tf, size)
    meter.charge(summary.cost)
    return summary


def psum(tf, n):
    """Sum of 2^-|p| over valid programs |p| <= n halting within tf's bound.

    Args:
        tf: A total time function.
        n: Size cutoff; psum(tf, 0) is 0.

    Returns:
        The exact Dyadic lower approximation to Omega_tf.
    """
    check_capacity(n)
    total = Dyadic.zero()
    for s in range(1, n + 1):
        total = total + stratum(tf, s).mass
    return total


def psum_metered(tf, n, meter):
    total = Dyadic.zero()
    for s in range(1, n + 1):
        total = total + charge_stratum(tf, s, meter).mass
    return total


@dataclass(frozen=True)
class OmegaApprox:
    level: int
    value: Dyadic
    time_fn: str


def omega_table(tf, n_max):
    check_capacity(n_max)
    rows = [OmegaApprox(0, Dyadic.zero(), tf.spec)]
    total = Dyadic.zero()
    for level in range(1, n_max + 1):
        total = total + stratum(tf, level).mass
        rows.append(OmegaApprox(level, total, tf.spec))
    logger.info("omega %s up to %d: %s", tf.spec, n_max, rows[-1].value)
    return rows


def omega_frame(rows):
    return pd.DataFrame({
        "level": [r.level for r in rows],
        "mantissa": [r.value.mantissa() or "0" for r in rows],
        "fraction": [str(r.value.as_fraction()) for r in rows],
        "time_fn": [r.time_fn for r in rows],
    })


@dataclass(frozen=True)
class Certificate:
    passed: bool
    level: int
    cost: int


def certify(tf, rho, max_level, meter=None):
    """Decide psum(tf, max_level) >= rho level by level.

    Stops at the first level whose sum reaches rho, or as soon as the
    remaining candidate mass up to ``max_level`` cannot close the gap.
    """
    meter = Meter() if meter is None else meter
    start = meter.used
    total = Dyadic.zero()
    for level in range(0, max_level + 1):
        if level:
            total = total + charge_stratum(tf, level, meter).mass
        meter.charge(COSTS["compare"])
        if total >= rho:
            return Certificate(True, level, meter.used - start)
        if total + candidate_mass(level + 1, max_level) < rho:
            meter.charge(COSTS["compare"])
            return Certificate(False, level, meter.used - start)
    return Certificate(False, max(max_level, 0), meter.used - start)
