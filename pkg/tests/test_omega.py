from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from subrecursive.config import set_capacity
from subrecursive.dyadic import Dyadic
from subrecursive.errors import CapacityError, DecodeError, DomainError
from subrecursive.memo import MEMO
from subrecursive.omega import (
    OmegaApprox,
    certify,
    charge_stratum,
    omega_frame,
    omega_table,
    psum,
    stratum,
)
from subrecursive.submachine import TimeFn
from subrecursive.vm import Fuel, Meter, OutOfFuel

dyadics = st.builds(
    lambda e, f: Dyadic(int(f * (1 << e)), e),
    st.integers(min_value=0, max_value=40),
    st.fractions(min_value=0, max_value=1),
)


def test_dyadic_parse():
    assert Dyadic.parse("0.0110") == Dyadic(3, 3)
    assert Dyadic.parse("0110") == Dyadic(6, 4)
    assert Dyadic.parse("1") == Dyadic.one()
    assert Dyadic.parse("1.000") == Dyadic.one()
    assert Dyadic.parse("0") == Dyadic.zero()
    with pytest.raises(DecodeError):
        Dyadic.parse("0.12")
    with pytest.raises(DecodeError):
        Dyadic.parse("1.01")


def test_dyadic_keeps_its_padding():
    padded = Dyadic(8, 4)
    assert padded.exponent == 4
    assert padded == Dyadic(1, 1)
    assert padded.mantissa() == "1"
    assert padded.mantissa(4) == "1000"
    assert str(padded) == "0.1"
    with pytest.raises(DomainError):
        Dyadic(3, 1)
    with pytest.raises(DomainError):
        Dyadic.one().mantissa()


@given(dyadics, dyadics)
def test_dyadic_order_and_sum_are_exact(a, b):
    assert (a < b) == (a.as_fraction() < b.as_fraction())
    assert (a == b) == (a.as_fraction() == b.as_fraction())
    if a.as_fraction() + b.as_fraction() <= 1:
        assert (a + b).as_fraction() == a.as_fraction() + b.as_fraction()
        assert a + b == b + a


def test_psum_base_cases(poly21):
    assert psum(poly21, 0) == Dyadic.zero()
    assert psum(poly21, 1) == Dyadic(1, 1)
    assert psum(poly21, 4) == Dyadic(1, 1)
    # PUSH0 HALT, PUSH1 HALT, OUT HALT
    assert psum(poly21, 5) == Dyadic(1, 1) + Dyadic(3, 5)


@pytest.mark.parametrize("spec", ["poly:2,1", "poly:1,2"])
def test_psum_is_monotone_and_below_one(spec):
    tf = TimeFn.parse(spec)
    values = [psum(tf, n) for n in range(11)]
    assert all(a <= b for a, b in zip(values, values[1:]))
    assert all(v < Dyadic.one() for v in values)
    assert all(v.normalized().exponent <= n for n, v in enumerate(values))


def test_psum_grows_with_the_bound():
    small, large = TimeFn.poly(1, 0), TimeFn.poly(2, 2)
    for n in range(11):
        assert psum(large, n) >= psum(small, n)


def test_psum_beyond_capacity():
    set_capacity(6)
    with pytest.raises(CapacityError):
        psum(TimeFn.poly(2, 1), 7)


def test_omega_table(poly21):
    assert omega_table(poly21, 0) == [OmegaApprox(0, Dyadic.zero(), "poly:2,1")]
    table = omega_table(poly21, 8)
    assert [row.value for row in table] == [psum(poly21, n) for n in range(9)]
    frame = omega_frame(table)
    assert list(frame.columns) == ["level", "mantissa", "fraction", "time_fn"]
    assert frame["mantissa"].iloc[1] == "1"
    assert frame["fraction"].iloc[1] == str(Fraction(1, 2))


def test_diagonal_table_dominates_inner(poly21, diag21):
    inner = omega_table(poly21, 8)
    outer = omega_table(diag21, 8)
    assert all(o.value >= i.value for o, i in zip(outer, inner))


def test_memo_does_not_change_results(poly21, fresh_memo):
    cached = [psum(poly21, n) for n in range(7)]
    with MEMO.disabled():
        assert [psum(poly21, n) for n in range(7)] == cached


def test_stratum_summary(poly21):
    summary = stratum(poly21, 1)
    assert (summary.valid, summary.halting, summary.best_numeric) == (1, 1, 1)
    assert summary.best_program == "0"
    assert summary.mass == Dyadic(1, 1)


def test_certify(poly21):
    target = psum(poly21, 6)
    cert = certify(poly21, target, 10)
    assert cert.passed and cert.level == 6
    assert certify(poly21, Dyadic.zero(), 10).level == 0
    assert not certify(poly21, Dyadic.parse("0.11"), 6).passed
    assert not certify(poly21, Dyadic.one(), 6).passed


def test_metered_stratum_stops_before_the_work(poly21, fresh_memo):
    meter = Meter(Fuel(3))
    with pytest.raises(OutOfFuel):
        charge_stratum(poly21, 9, meter)
    assert ("stratum", "poly:2,1", 9) not in fresh_memo


def test_metered_certify_charges_what_it_spends(poly21, fresh_memo):
    rho = psum(poly21, 6)
    meter = Meter()
    cert = certify(poly21, rho, 6, meter)
    assert cert.passed
    assert cert.cost == meter.used > 0
