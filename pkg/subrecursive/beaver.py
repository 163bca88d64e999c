"""Busy Beaver Plus, the pi'_Omega procedure and sub-algorithmic complexity."""
from dataclasses import dataclass

import pandas as pd

from subrecursive.codec import encode_apply, encode_base, encode_nat, valid_programs
from subrecursive.log import get_logger
from subrecursive.omega import charge_stratum, check_capacity, psum, stratum
from subrecursive.submachine import eval_sub, evaluate
from subrecursive.vm import COSTS, Diverged

logger = get_logger(__name__)


@dataclass(frozen=True)
class BBRecord:
    level: int
    bb: int
    bb_plus: int
    witness: str | None

    @property
    def witness_size(self):
        return len(self.witness) if self.witness else 0


def bb_record(tf, n):
    check_capacity(n)
    best, witness = 0, None
    for s in range(1, n + 1):
        summary = stratum(tf, s)
        if summary.best_numeric > best:
            best, witness = summary.best_numeric, summary.best_program
    return BBRecord(n, best, best + 1, witness)


def bb(tf, n):
    """Largest numeric output of a program of size <= n on U_tf; 0 when n = 0."""
    return bb_record(tf, n).bb


def bb_plus(tf, n):
    return bb(tf, n) + 1


def bb_table(tf, n_max):
    check_capacity(n_max)
    return [bb_record(tf, n) for n in range(n_max + 1)]


def bb_frame(records):
    return pd.DataFrame({
        "N": [r.level for r in records],
        "bb": [r.bb for r in records],
        "bb_plus": [r.bb_plus for r in records],
        "witness": [r.witness or "" for r in records],
        "witness_size": [r.witness_size for r in records],
    })


def pi_omega(tf, rho, guard_k):
    """Convert a lower approximation rho of Omega_tf into a BB+ value.

    Args:
        tf: A total time function.
        rho: Dyadic target.
        guard_k: Largest level searched before giving up.

    Returns:
        0 when rho is 0, bb(tf, k) + 1 for the least k with psum(tf, k) >= rho,
        or Diverged(guard_k) when no k <= guard_k reaches rho.
    """
    if rho.numerator == 0:
        return 0
    for k in range(1, guard_k + 1):
        if psum(tf, k) >= rho:
            return bb_plus(tf, k)
    return Diverged(guard_k)


def pi_omega_metered(tf, rho, meter):
    if rho.numerator == 0:
        meter.charge(COSTS["compare"])
        return 0
    total = psum(tf, 0)
    best = 0
    k = 0
    while total < rho:
        k += 1
        summary = charge_stratum(tf, k, meter)
        meter.charge(COSTS["compare"])
        total = total + summary.mass
        best = max(best, summary.best_numeric)
    # one step per listed output, then the increment
    meter.charge(sum(stratum(tf, s).valid for s in range(1, k + 1)) + COSTS["increment"])
    return best + 1


@dataclass(frozen=True)
class NotFoundBelow:
    bound: int


def sub_complexity(tf, target, bound):
    """Size of the shortest program whose submachine output is ``target``.

    Args:
        tf: A total time function.
        target: Numeric output to look for.
        bound: Largest program size searched.

    Returns:
        The size, or NotFoundBelow(bound).
    """
    check_capacity(bound)
    for s in range(1, bound + 1):
        for p in valid_programs(s):
            if evaluate(tf, p).numeric == target:
                return s
    return NotFoundBelow(bound)


def incompressibility_report(tf, n_max):
    """Check exhaustively that no program of size <= N reaches BB+(N)."""
    check_capacity(n_max)
    rows = []
    largest = 0
    programs = 0
    for n in range(n_max + 1):
        if n:
            for p in valid_programs(n):
                largest = max(largest, evaluate(tf, p).numeric)
                programs += 1
        limit = bb_plus(tf, n)
        rows.append({
            "N": n,
            "bb_plus": limit,
            "max_output": largest,
            "programs": programs,
            "passed": largest < limit,
        })
    passed = all(r["passed"] for r in rows)
    logger.info("incompressibility %s up to %d: %s", tf.spec, n_max, "ok" if passed else "FAILED")
    return {"time_fn": tf.spec, "horizon": n_max, "passed": passed, "rows": rows}


ADVERSARIES = {
    "constant": encode_base(["PUSH1", "OUT", "HALT"]),
    "echo": encode_base(["NEXT", "OUT", "MORE", ("JNZB", 2), "HALT"]),
    "doubler": encode_base(["NEXT", "DUP", "OUT", "OUT", "MORE", ("JNZB", 4), "HALT"]),
}


def adversary_input(program, n):
    """The program P applied to the integer code of n."""
    return encode_apply(program, [encode_nat(n)])


def _dominance_rows(tf, program, horizon):
    rows = []
    for n in range(1, horizon + 1):
        w = adversary_input(program, n)
        output = eval_sub(tf, w).numeric
        limit = bb_plus(tf, n)
        rows.append({
            "N": n,
            "size": len(w),
            "output": output,
            "bb_plus": limit,
            "dominated": output < limit,
        })
    return rows


def dominance_report(tf, horizon, adversaries=None):
    """Strict dominance of BB+ over a fixed family of adversary programs.

    Each adversary gets its empirical N0 (the least N after which every level
    up to the horizon is dominated) and its size threshold, the least N with
    |P o N| <= N. An adversary passes when it has an N0 or its threshold lies
    beyond the horizon, and nothing at or above the threshold is undominated.
    A pass of the second kind checked nothing and is marked vacuous.
    """
    check_capacity(horizon)
    adversaries = ADVERSARIES if adversaries is None else adversaries
    entries = []
    for name, program in adversaries.items():
        rows = _dominance_rows(tf, program, horizon)
        n0 = None
        for row in reversed(rows):
            if not row["dominated"]:
                break
            n0 = row["N"]
        threshold = next(n for n in range(1, 1 << 16) if len(adversary_input(program, n)) <= n)
        late_violation = any(not r["dominated"] for r in rows if r["N"] >= threshold)
        passed = (n0 is not None or threshold > horizon) and not late_violation
        vacuous = n0 is None and threshold > horizon
        entries.append({
            "adversary": name,
            "program": program,
            "n0": n0,
            "size_threshold": threshold,
            "passed": passed,
            "vacuous": vacuous,
            "rows": rows,
        })
        logger.info("dominance %s: N0=%s threshold=%d", name, n0, threshold)
        if vacuous:
            logger.warning("dominance %s holds only because its threshold %d lies past horizon %d",
                           name, threshold, horizon)
    return {
        "time_fn": tf.spec,
        "horizon": horizon,
        "passed": all(e["passed"] for e in entries),
        "adversaries": entries,
    }


def hierarchy_table(tfs, n_max):
    """psum and BB+ side by side for several time functions."""
    rows = []
    for tf in tfs:
        for n in range(n_max + 1):
            value = psum(tf, n)
            rows.append({
                "time_fn": tf.spec,
                "N": n,
                "psum": value.mantissa() or "0",
                "bb_plus": bb_plus(tf, n),
            })
    return pd.DataFrame(rows)
