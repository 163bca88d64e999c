"""The extension P*_T and the diagonal time function P**_T.

P**_T grants extra time to exactly those programs of the form
pi'_Omega o P**_T o P_T o rho-block whose rho is certified by psum of the
diagonal submachine at size |w| - 1. Certification only looks at strictly
shorter programs, so the recursion is well founded; a thread-local guard
turns any violation into RecursionGuardError.
"""
import threading
from contextlib import contextmanager
from dataclasses import dataclass

from subrecursive.beaver import bb_plus, pi_omega
from subrecursive.codec import (
    INVALID,
    Apply,
    PrimitiveHead,
    encode_apply,
    encode_rho,
    head_bits,
    index_of,
    read_rho,
    try_decompose,
    valid_programs,
)
from subrecursive.dyadic import Dyadic
from subrecursive.errors import RecursionGuardError
from subrecursive.log import get_logger
from subrecursive.memo import MEMO
from subrecursive.omega import certify, check_capacity, psum
from subrecursive.submachine import TimeFn, eval_sub, time_bound, time_bound_run
from subrecursive.vm import COSTS, DISPATCH, UNBOUNDED, Halted, Meter, OutOfFuel, run

logger = get_logger(__name__)


@dataclass(frozen=True)
class FormMatch:
    matched: bool
    rho: Dyadic | None = None
    rho_block_width: int = 0


NO_MATCH = FormMatch(False)


def match_form(outer, w):
    """Does w parse exactly as pi'_Omega o outer o rho-block?"""
    form = try_decompose(w)
    if form is INVALID or not isinstance(form, Apply):
        return NO_MATCH
    head = form.head
    if not isinstance(head, PrimitiveHead) or head.head != "PIOMEGA" or len(form.args) != 2:
        return NO_MATCH
    if TimeFn.from_program(form.args[0]) != outer:
        return NO_MATCH
    rho, _ = read_rho(form.args[1], 0)
    return FormMatch(True, rho, rho.exponent)


# --- recursion guard --------------------------------------------------------

_local = threading.local()


def _stacks():
    stacks = getattr(_local, "stacks", None)
    if stacks is None:
        stacks = _local.stacks = {}
        _local.max_depth = 0
    return stacks


def max_depth():
    _stacks()
    return _local.max_depth


def reset_depth():
    _stacks()
    _local.max_depth = 0


@contextmanager
def recursion_guard(spec, w):
    stack = _stacks().setdefault(spec, [])
    if stack and len(w) >= stack[-1]:
        raise RecursionGuardError(
            f"{spec}: evaluation of a {len(w)}-bit string inside a {stack[-1]}-bit one ({w})")
    stack.append(len(w))
    _local.max_depth = max(_local.max_depth, len(stack) - 1)
    try:
        yield
    finally:
        stack.pop()


# --- time functions ---------------------------------------------------------

def p_star_time_run(outer, inner, w, self_assembly=False, meter=None):
    """Value and step count of P*_T o outer o inner o w.

    Clause (i) returns the running time of w when w has the pi'_Omega form
    over ``outer``, its rho is certified at size |w| - 1 and that running
    time exceeds the inner bound. Clause (ii) returns the inner bound.
    Steps are charged to ``meter`` as the work happens.
    """
    meter = Meter() if meter is None else meter
    start = meter.used
    meter.charge(DISPATCH + COSTS["form_check"])
    clause_one = None
    m = match_form(outer, w)
    if m.matched and certify(outer, m.rho, len(w) - 1, meter).passed:
        meter.charge(COSTS["inner_run"])
        outcome = run(w, meter.budget())
        if not isinstance(outcome, Halted):
            raise OutOfFuel(meter.fuel)
        meter.charge(outcome.steps + COSTS["compare"])
        clause_one = outcome.steps
    meter.charge(COSTS["inner_run"])
    bound, _ = time_bound_run(inner, w, meter)
    if self_assembly:
        meter.charge(COSTS["self_assembly"])
    steps = meter.used - start
    if clause_one is not None and clause_one > bound:
        return clause_one, steps
    return bound, steps


def p_star_time(outer, inner, w):
    return p_star_time_run(outer, inner, w)[0]


def p_star_star_time_run(inner, w, meter=None):
    diag = TimeFn.diagonal(inner)
    with recursion_guard(diag.spec, w):
        child = Meter() if meter is None else meter.child()
        result = MEMO.get_or_compute(
            ("tb", diag.spec, w),
            lambda: p_star_time_run(diag, inner, w, self_assembly=True, meter=child),
        )
    if meter is not None:
        meter.charge(result[1])
    return result


def p_star_star_time(inner, w):
    """The diagonal time bound U(P**_T o P_T o w).

    Args:
        inner: The wrapped time function P_T.
        w: Any bit string.

    Returns:
        p_star_time(Diagonal(inner), inner, w), computed once per (inner, w).
    """
    return p_star_star_time_run(inner, w)[0]


def witness_program(inner, rho, width=None):
    diag = TimeFn.diagonal(inner)
    return encode_apply(head_bits("PIOMEGA"), [diag.program, encode_rho(rho, width)])


def min_form_size(inner):
    """Size of the smallest (i)-form; shorter strings always take clause (ii)."""
    return len(witness_program(inner, Dyadic.zero()))


# --- checks -----------------------------------------------------------------

def _certified_forms(inner, witness_horizon, form_width):
    diag = TimeFn.diagonal(inner)
    ceiling = psum(diag, witness_horizon)
    forms = []
    for width in range(form_width + 1):
        for m in range(1 << width):
            rho = Dyadic(m, width)
            if rho <= ceiling:
                forms.append(witness_program(inner, rho, width))
    return forms


def verify_totality(inner, horizon, witness_horizon=0, form_width=3):
    """Evaluate the diagonal submachine on every valid program up to ``horizon``.

    Args:
        inner: The wrapped time function.
        horizon: Largest program size swept exhaustively.
        witness_horizon: Level whose psum caps the rho of the extra (i)-forms.
        form_width: Largest rho block width among the extra (i)-forms.

    Returns:
        A report dict with counts, the deepest nesting seen, the clause (i)
        count, extension-law failures and any guard violation.
    """
    check_capacity(horizon)
    diag = TimeFn.diagonal(inner)
    reset_depth()
    report = {
        "time_fn": diag.spec,
        "horizon": horizon,
        "k0": min_form_size(inner),
        "evaluated": 0,
        "clause_one": 0,
        "extension_failures": [],
        "violation": None,
    }
    programs = [p for s in range(1, horizon + 1) for p in valid_programs(s)]
    if form_width >= 0 and witness_horizon:
        programs.extend(_certified_forms(inner, witness_horizon, form_width))
        # the rho ceiling filled the diagonal memo; nested evaluations must
        # run again under the guard
        MEMO.forget(diag.spec)
    try:
        for w in programs:
            eval_sub(diag, w)
            extended = time_bound(diag, w)
            base = time_bound(inner, w)
            if extended < base:
                report["extension_failures"].append(w)
            elif extended > base:
                report["clause_one"] += 1
            report["evaluated"] += 1
    except RecursionGuardError as e:
        report["violation"] = str(e)
        logger.error("guard violation: %s", e)
    report["max_depth"] = max_depth()
    report["passed"] = report["violation"] is None and not report["extension_failures"]
    logger.info("totality %s up to %d: %d programs, depth %d, clause (i) %d",
                diag.spec, horizon, report["evaluated"], report["max_depth"], report["clause_one"])
    return report


@dataclass(frozen=True)
class WitnessReport:
    level: int
    witness: str
    witness_size: int
    output: int
    expected: int
    sub_numeric: int
    size_bound_constant: int

    @property
    def passed(self):
        return (self.output == self.expected
                and self.sub_numeric == self.expected + 1
                and self.witness_size >= self.level + 1)


def build_witness(inner, n):
    """Assemble and run the program computing BB+(N) on the diagonal submachine.

    rho is psum of the diagonal at level N, padded with trailing zeros until
    the witness is longer than N.
    """
    check_capacity(n)
    diag = TimeFn.diagonal(inner)
    rho = psum(diag, n)
    width = rho.width
    w = witness_program(inner, rho, width)
    while len(w) - 1 < n:
        width += 1
        w = witness_program(inner, rho, width)
    outcome = run(w, UNBOUNDED)
    output = index_of(outcome.output) - 1 if isinstance(outcome, Halted) else -1
    return WitnessReport(
        level=n,
        witness=w,
        witness_size=len(w),
        output=output,
        expected=bb_plus(diag, n),
        sub_numeric=eval_sub(diag, w).numeric,
        size_bound_constant=len(w) - 2 * n,
    )


def witness_table(inner, levels):
    """Witness reports for every level, with the one C that bounds them all."""
    reports = [build_witness(inner, n) for n in levels]
    constant = max((r.size_bound_constant for r in reports), default=0)
    rows = [{
        "N": r.level,
        "witness": r.witness,
        "witness_size": r.witness_size,
        "output": r.output,
        "expected": r.expected,
        "sub_numeric": r.sub_numeric,
        "within_bound": r.level + 1 <= r.witness_size <= 2 * r.level + constant,
        "passed": r.passed,
    } for r in reports]
    passed = all(row["passed"] and row["within_bound"] for row in rows)
    logger.info("witness %s: C = %d, %s", TimeFn.diagonal(inner).spec, constant,
                "ok" if passed else "FAILED")
    return {"time_fn": TimeFn.diagonal(inner).spec, "C": constant, "passed": passed, "rows": rows}


def relative_witness(inner, n):
    """pi'_Omega o inner o rho on the unbounded U computes BB+_inner(N).

    The report puts its unbounded running time next to the bound U_inner
    grants it, and U_inner's own output for the same program.
    """
    rho = psum(inner, n)
    w = encode_apply(head_bits("PIOMEGA"), [inner.program, encode_rho(rho)])
    outcome = run(w, UNBOUNDED)
    output = index_of(outcome.output) - 1
    return {
        "N": n,
        "program": w,
        "size": len(w),
        "output": output,
        "expected": bb_plus(inner, n),
        "unbounded_steps": outcome.steps,
        "bound": time_bound(inner, w),
        "sub_numeric": eval_sub(inner, w).numeric,
        "pi_omega": pi_omega(inner, rho, max(n, 1)),
    }
