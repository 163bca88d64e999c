"""Handlers for the reserved heads of L.

Each handler receives a saturated Apply and the run's meter, charges its
schedule and returns the output bits. Importing this module registers them.
"""
from subrecursive.beaver import pi_omega_metered
from subrecursive.codec import (
    decode_nat,
    decode_rho,
    emit_number,
    index_of,
    nth_string,
    try_decompose,
)
from subrecursive.diagonal import p_star_star_time_run, p_star_time_run
from subrecursive.omega import psum_metered
from subrecursive.submachine import TimeFn, time_bound_run
from subrecursive.vm import COSTS, DISPATCH, Fuel, Halted, execute, register_head, run


@register_head("POLY")
def _poly(form, meter):
    value, _ = time_bound_run(TimeFn.poly(*form.head.payload), form.args[0], meter)
    return emit_number(value)


@register_head("T")
def _computation_time(form, meter):
    meter.charge(DISPATCH + COSTS["t_overhead"])
    start = meter.used
    execute(try_decompose(form.args[0]), meter)
    return emit_number(meter.used - start)


@register_head("PSM")
def _submachine(form, meter):
    meter.charge(DISPATCH)
    tf = TimeFn.from_program(form.args[0])
    if tf is None:
        return "0"
    w = form.args[1]
    meter.charge(COSTS["inner_run"])
    bound, _ = time_bound_run(tf, w, meter)
    meter.charge(COSTS["inner_run"])
    remaining = meter.remaining
    outcome = run(w, Fuel(bound if remaining is None else min(bound, remaining)))
    if isinstance(outcome, Halted):
        meter.charge(outcome.steps)
        return nth_string(index_of(outcome.output) + 1)
    meter.charge(bound)
    return "0"


@register_head("PSUM")
def _psum(form, meter):
    meter.charge(DISPATCH)
    tf = TimeFn.from_program(form.args[0])
    if tf is None:
        return "0"
    total = psum_metered(tf, decode_nat(form.args[1]), meter)
    return total.mantissa() or "0"


@register_head("PIOMEGA")
def _pi_omega(form, meter):
    meter.charge(DISPATCH)
    tf = TimeFn.from_program(form.args[0])
    if tf is None:
        return "0"
    rho = decode_rho(form.args[1])
    return emit_number(pi_omega_metered(tf, rho, meter))


@register_head("PSTAR")
def _p_star(form, meter):
    outer = TimeFn.from_program(form.args[0])
    inner = TimeFn.from_program(form.args[1])
    if outer is None or inner is None:
        meter.charge(DISPATCH)
        return "0"
    value, _ = p_star_time_run(outer, inner, form.args[2], meter=meter)
    return emit_number(value)


@register_head("PSTARSTAR")
def _p_star_star(form, meter):
    inner = TimeFn.from_program(form.args[0])
    if inner is None:
        meter.charge(DISPATCH)
        return "0"
    value, _ = p_star_star_time_run(inner, form.args[1], meter)
    return emit_number(value)
