import pytest
from hypothesis import given, settings, strategies as st

from subrecursive.beaver import ADVERSARIES
from subrecursive.codec import (
    encode_apply,
    encode_base,
    encode_nat,
    encode_rho,
    head_bits,
    index_of,
    nat_literal,
    poly_program,
    valid_programs,
)
from subrecursive.config import set_capacity
from subrecursive.dyadic import Dyadic
from subrecursive.errors import CapacityError, DomainError
from subrecursive.vm import (
    COSTS,
    UNBOUNDED,
    Diverged,
    Exhausted,
    Fuel,
    Halted,
    Meter,
    OutOfFuel,
    run,
    run_steps,
    schedule_text,
)

LOOP = encode_base(["PUSH1", ("JNZB", 0), "HALT"])
EMIT_ONE = encode_base(["PUSH1", "OUT", "HALT"])
SMALL = [p for size in range(1, 11) for p in valid_programs(size)]


def test_nat_literal_is_one_step():
    assert run(nat_literal(2)) == Halted("00", 1)


def test_zero_fuel_exhausts():
    assert run("0", Fuel(0)) == Exhausted(0)
    assert run(nat_literal(2), Fuel(0)) == Exhausted(0)


def test_loop_exhausts_its_fuel():
    assert run(LOOP, Fuel(10**6)) == Exhausted(10**6)


def test_invalid_parse_halts_with_l1():
    assert run("1") == Halted("0", 1)
    assert run("11000" * 3 + head_bits("PSM") + "000") == Halted("0", 1)


def test_base_machine():
    assert run(encode_base(["OUT", "HALT"])) == Halted("0", 2)
    assert run(EMIT_ONE) == Halted("1", 3)
    assert run(encode_base(["PUSH1", "PUSH0", "BURY", "OUT", "OUT", "HALT"])) == Halted("10", 6)


def test_echo_reads_its_tape():
    tape = encode_nat(5)
    outcome = run(encode_apply(ADVERSARIES["echo"], [tape]))
    assert outcome.output == tape
    assert outcome.steps == 4 * len(tape) + 2


def test_trace_lines():
    lines = []
    run(EMIT_ONE, trace=lines.append)
    assert lines == ["1\tPUSH1\t0", "2\tOUT\t1", "3\tHALT\t0"]


def test_unsaturated_head_halts_with_l1():
    assert run(head_bits("PSM")) == Halted("0", 1)
    assert run(encode_apply(head_bits("PSM"), [poly_program(2, 1)])) == Halted("0", 1)


def test_poly_head():
    # HALT is the one-bit program; 2 * (1 + 1)^1 + 2
    outcome = run(encode_apply(poly_program(2, 1), ["0"]))
    assert index_of(outcome.output) - 1 == 6
    assert outcome.steps == COSTS["dispatch"] + 1 + COSTS["poly_tail"]


def test_computation_time_head():
    outcome = run(encode_apply(head_bits("T"), [EMIT_ONE]))
    assert index_of(outcome.output) - 1 == run_steps(EMIT_ONE) == 3
    assert outcome.steps == 2 + 3


def test_computation_time_of_a_loop_diverges():
    assert run_steps(encode_apply(head_bits("T"), [LOOP]), guard=10**5) == Diverged(10**5)


def test_submachine_head():
    outcome = run(encode_apply(head_bits("PSM"), [poly_program(2, 1), EMIT_ONE]))
    assert outcome == Halted("00", 1 + (1 + 4) + (1 + 3))
    assert run(encode_apply(head_bits("PSM"), ["0", "0"])) == Halted("0", 1)


def test_run_steps_matches_run():
    assert run_steps(nat_literal(2)) == 1
    assert run_steps(EMIT_ONE, guard=3) == 3
    assert run_steps(EMIT_ONE, guard=2) == Diverged(2)


def test_meter():
    meter = Meter(Fuel(3))
    meter.charge(3)
    assert meter.remaining == 0
    with pytest.raises(OutOfFuel):
        meter.charge(1)
    assert Meter(UNBOUNDED).remaining is None
    with pytest.raises(DomainError):
        Fuel(-1)


@settings(max_examples=200)
@given(st.sampled_from(SMALL), st.integers(min_value=0, max_value=60), st.integers(min_value=0, max_value=60))
def test_more_fuel_never_changes_a_halt(p, fuel, extra):
    first = run(p, Fuel(fuel))
    if isinstance(first, Halted):
        assert run(p, Fuel(fuel + extra)) == first
        assert run(p, UNBOUNDED) == first


@given(st.sampled_from(SMALL), st.integers(min_value=0, max_value=60))
def test_runs_are_deterministic(p, fuel):
    assert run(p, Fuel(fuel)) == run(p, Fuel(fuel))


def test_schedule_text():
    lines = schedule_text().splitlines()
    assert len(lines) == len(COSTS)
    assert "cost dispatch 1" in lines


def test_fuel_bounded_search_past_capacity_is_exhausted():
    set_capacity(12)
    w = encode_apply(head_bits("PIOMEGA"), [poly_program(1, 0), encode_rho(Dyadic.parse("0.1111"))])
    assert run(w, Fuel(10**9)) == Exhausted(10**9)
    with pytest.raises(CapacityError):
        run(w)


def test_nested_heads_stop_at_the_callers_fuel():
    w = encode_apply(head_bits("PSUM"), [poly_program(2, 1), encode_nat(9)])
    full = run(w)
    assert isinstance(full, Halted)
    assert run(w, Fuel(full.steps)) == full
    assert run(w, Fuel(full.steps - 1)) == Exhausted(full.steps - 1)
