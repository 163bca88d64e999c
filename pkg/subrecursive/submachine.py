"""Turing submachines U_{P_T}: U wrapped by a total time-bound program."""
from dataclasses import dataclass
from functools import lru_cache

from subrecursive.codec import (
    INVALID,
    Apply,
    PrimitiveHead,
    encode_apply,
    head_bits,
    index_of,
    nth_string,
    poly_program,
    try_decompose,
)
from subrecursive.errors import ConfigError
from subrecursive.memo import MEMO
from subrecursive.vm import COSTS, DISPATCH, Fuel, Halted, run


@dataclass(frozen=True)
class TimeFn:
    family: str
    c: int = 0
    k: int = 0
    inner: "TimeFn | None" = None

    asserted_total = True

    @classmethod
    def poly(cls, c, k):
        if c < 1 or k < 0:
            raise ConfigError(f"poly needs c >= 1 and k >= 0, got c={c}, k={k}")
        return cls("poly", c, k)

    @classmethod
    def diagonal(cls, inner):
        return cls("diag", inner=inner)

    @classmethod
    def parse(cls, spec):
        """Parse ``poly:c,k`` or ``diag:<spec>``."""
        text = spec.strip()
        if text.startswith("diag:"):
            return cls.diagonal(cls.parse(text[len("diag:"):]))
        family, _, params = text.partition(":")
        if family != "poly":
            raise ConfigError(f"unknown time function {spec!r}, expected poly:c,k or diag:...")
        try:
            c, k = (int(x) for x in params.split(","))
        except ValueError as e:
            raise ConfigError(f"malformed time function {spec!r}") from e
        return cls.poly(c, k)

    @classmethod
    def from_program(cls, bits):
        return _recognize(bits)

    @property
    def spec(self):
        if self.family == "poly":
            return f"poly:{self.c},{self.k}"
        return f"diag:{self.inner.spec}"

    @property
    def program(self):
        if self.family == "poly":
            return poly_program(self.c, self.k)
        return encode_apply(head_bits("PSTARSTAR"), [self.inner.program])

    def __str__(self):
        return self.spec


@lru_cache(maxsize=4096)
def _recognize(bits):
    form = try_decompose(bits)
    if isinstance(form, PrimitiveHead) and form.head == "POLY":
        return TimeFn.poly(*form.payload)
    if (form is not INVALID and isinstance(form, Apply)
            and isinstance(form.head, PrimitiveHead) and form.head.head == "PSTARSTAR"
            and len(form.args) == 1):
        inner = _recognize(form.args[0])
        if inner is not None:
            return TimeFn.diagonal(inner)
    return None


def _poly_run(tf, w):
    value = tf.c * (len(w) + 1) ** tf.k + tf.c
    return value, DISPATCH + tf.k + COSTS["poly_tail"]


def time_bound_run(tf, w, meter=None):
    """Value and step count of U(tf.program ∘ w), charged to ``meter`` if given."""
    if tf.family == "diag":
        from subrecursive import diagonal
        return diagonal.p_star_star_time_run(tf.inner, w, meter)
    result = MEMO.get_or_compute(("tb", tf.spec, w), lambda: _poly_run(tf, w))
    if meter is not None:
        meter.charge(result[1])
    return result


def time_bound(tf, w):
    """The submachine's time bound on w.

    Args:
        tf: A total time function.
        w: Any bit string.

    Returns:
        U(tf.program ∘ w) as a number; c*(|w|+1)^k + c for the poly family.
    """
    return time_bound_run(tf, w)[0]


@dataclass(frozen=True)
class SubOutput:
    value: str
    numeric: int


def eval_sub(tf, w):
    """U_{P_T}(w): l_{k+1} when w halts in time with output l_k, else l_1."""
    outcome = run(w, Fuel(time_bound(tf, w)))
    if isinstance(outcome, Halted):
        k = index_of(outcome.output)
        return SubOutput(nth_string(k + 1), k)
    return SubOutput("0", 0)


@dataclass(frozen=True)
class ProgramEval:
    program: str
    bound: int
    tb_steps: int
    halted: bool
    steps: int
    output_index: int

    @property
    def numeric(self):
        return self.output_index if self.halted else 0

    @property
    def cost(self):
        return (COSTS["inner_run"] + self.tb_steps) + (COSTS["inner_run"] + self.steps)


def _evaluate(tf, p):
    bound, tb_steps = time_bound_run(tf, p)
    outcome = run(p, Fuel(bound))
    if isinstance(outcome, Halted):
        return ProgramEval(p, bound, tb_steps, True, outcome.steps, index_of(outcome.output))
    return ProgramEval(p, bound, tb_steps, False, bound, 0)


def evaluate(tf, p):
    """Memoized evaluation record of program p under the submachine tf."""
    return MEMO.get_or_compute(("eval", tf.spec, p), lambda: _evaluate(tf, p))
