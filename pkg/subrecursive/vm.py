"""The universal machine U: a step-counted interpreter for L.

Base programs run on a stack of bits with a read-only input tape and an
append-only output buffer. Reserved heads are dispatched to handlers
registered by ``subrecursive.heads``; every handler charges the frozen cost
schedule in ``COSTS`` against the run's meter.
"""
from collections import deque
from dataclasses import dataclass
from functools import lru_cache

from subrecursive.codec import (
    INVALID,
    Apply,
    BaseProgram,
    PrimitiveHead,
    emit_number,
    try_decompose,
)
from subrecursive.errors import CapacityError, DomainError, SubrecursiveError

COSTS = {
    "dispatch": 1,
    "opcode": 1,
    "poly_tail": 2,
    "t_overhead": 1,
    "inner_run": 1,
    "halter": 1,
    "compare": 1,
    "form_check": 1,
    "self_assembly": 1,
    "increment": 1,
}
DISPATCH = COSTS["dispatch"]


class VMError(SubrecursiveError): ...
class OutOfFuel(VMError): ...


@dataclass(frozen=True)
class Fuel:
    limit: int

    def __post_init__(self):
        if self.limit < 0:
            raise DomainError(f"fuel must be nonnegative, got {self.limit}")


class Unbounded:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "UNBOUNDED"


UNBOUNDED = Unbounded()


@dataclass(frozen=True)
class Halted:
    output: str
    steps: int


@dataclass(frozen=True)
class Exhausted:
    fuel: int


@dataclass(frozen=True)
class Diverged:
    """No halt observed within ``guard`` steps (or levels, for searches)."""
    guard: int


class Meter:
    __slots__ = ("fuel", "used")

    def __init__(self, budget=UNBOUNDED):
        self.fuel = budget.limit if isinstance(budget, Fuel) else None
        self.used = 0

    @property
    def remaining(self):
        return None if self.fuel is None else self.fuel - self.used

    def charge(self, n):
        self.used += n
        if self.fuel is not None and self.used > self.fuel:
            raise OutOfFuel(self.fuel)

    def budget(self):
        """Budget left for a nested run."""
        return UNBOUNDED if self.fuel is None else Fuel(self.fuel - self.used)

    def child(self):
        """A fresh meter that may spend at most what this one has left."""
        return Meter(self.budget())


HEAD_HANDLERS = {}


def register_head(name):
    def decorator(fn):
        HEAD_HANDLERS[name] = fn
        return fn
    return decorator


_OPS = ("HALT", "PUSH0", "PUSH1", "OUT", "JNZB", "DUP", "NEXT", "MORE", "DROP", "JNZF", "BURY")
(HALT, PUSH0, PUSH1, OUT, JNZB, DUP, NEXT, MORE, DROP, JNZF, BURY) = range(len(_OPS))
_OPCODE = {name: i for i, name in enumerate(_OPS)}


@lru_cache(maxsize=1 << 16)
def _compile(prog):
    code = []
    for i, ins in enumerate(prog.ops):
        target = -1
        if ins.op == "JNZB":
            target = i - ins.operand - 1
        elif ins.op == "JNZF":
            target = i + 2 + ins.operand
        code.append((_OPCODE[ins.op], target))
    return tuple(code)


def _run_base(prog, tape, meter, trace):
    code = _compile(prog)
    limit = meter.remaining
    stack = deque()
    out = []
    pc = pos = steps = 0
    n_in = len(tape)
    while True:
        if limit is not None and steps >= limit:
            meter.charge(steps + 1)
        steps += 1
        op, target = code[pc]
        if trace is not None:
            trace(f"{meter.used + steps}\t{_OPS[op]}\t{len(stack)}")
        if op == HALT:
            break
        if op == PUSH0:
            stack.append(0)
        elif op == PUSH1:
            stack.append(1)
        elif op == OUT:
            out.append("1" if stack and stack.pop() else "0")
        elif op == JNZB or op == JNZF:
            if stack and stack.pop():
                pc = target
                continue
        elif op == DUP:
            stack.append(stack[-1] if stack else 0)
        elif op == NEXT:
            if pos < n_in:
                stack.append(1 if tape[pos] == "1" else 0)
                pos += 1
            else:
                stack.append(0)
        elif op == MORE:
            stack.append(1 if pos < n_in else 0)
        elif op == DROP:
            if stack:
                stack.pop()
        elif op == BURY:
            stack.appendleft(stack.pop() if stack else 0)
        pc += 1
    meter.charge(steps)
    return "".join(out) or "0"


def execute(form, meter, trace=None):
    """Run a parsed form against ``meter`` and return its output bits."""
    if form is INVALID:
        meter.charge(DISPATCH)
        return "0"
    if isinstance(form, BaseProgram):
        return _run_base(form, "", meter, trace)
    if isinstance(form, PrimitiveHead):
        meter.charge(DISPATCH)
        if trace is not None:
            trace(f"{meter.used}\t{form.head}\t0")
        return emit_number(form.payload[0]) if form.head == "NAT" else "0"
    if not isinstance(form, Apply):
        raise VMError(f"cannot execute {form!r}")
    head = form.head
    if isinstance(head, BaseProgram):
        meter.charge(DISPATCH)
        return _run_base(head, "".join(form.args), meter, trace)
    if not form.saturated:
        meter.charge(DISPATCH)
        return "0"
    handler = HEAD_HANDLERS.get(head.head)
    if handler is None:
        raise VMError(f"no handler registered for {head.head}")
    if trace is not None:
        trace(f"{meter.used + 1}\t{head.head}\t0")
    return handler(form, meter)


def run(w, budget=UNBOUNDED, trace=None):
    """Run w on U.

    Args:
        w: Program bits. Invalid parses halt with "0" in one step.
        budget: Fuel(n) or UNBOUNDED.
        trace: Optional callable receiving "step<TAB>opcode<TAB>depth" lines.

    Returns:
        Halted(output, steps) or Exhausted(fuel). Under a Fuel budget a
        search past the enumeration capacity also ends as Exhausted; without
        one it raises CapacityError.
    """
    meter = Meter(budget)
    try:
        output = execute(try_decompose(w), meter, trace)
    except OutOfFuel:
        return Exhausted(budget.limit)
    except CapacityError:
        if not isinstance(budget, Fuel):
            raise
        return Exhausted(budget.limit)
    return Halted(output, meter.used)


def run_steps(w, guard=None):
    """Steps U performs on w, or Diverged(guard) when it does not halt in time."""
    outcome = run(w, UNBOUNDED if guard is None else Fuel(guard))
    if isinstance(outcome, Halted):
        return outcome.steps
    return Diverged(guard)


def schedule_text():
    return "".join(f"cost {name} {value}\n" for name, value in COSTS.items())
