"""The prefix-free binary language L.

Programs are terms written in prefix notation::

    APPLY^k head a1 .. ak

``head`` is either a base program (a run of stack-machine opcodes closed by
HALT) or a reserved head. A base program takes raw integer codes as
arguments and reads their concatenated bits as its input tape. Reserved
heads declare typed slots: a TERM slot holds another program, a NAT slot a
raw integer code, a RHO slot a raw rho block. ``encode_apply`` is the
functionalizing concatenation; nesting flattens, so
``encode_apply(H, args) == APPLY * len(args) + H + args``.

Published constants: C = C_APPLY = 5, C' = 4, epsilon = 1.
"""
import math
from dataclasses import dataclass
from functools import lru_cache

from subrecursive.dyadic import Dyadic
from subrecursive.errors import DecodeError, DomainError, EncodingError

CODEWORDS = {
    "HALT": "0",
    "PUSH0": "1000",
    "PUSH1": "1001",
    "OUT": "1010",
    "JNZB": "1011",
    "APPLY": "11000",
    "DUP": "11001",
    "NEXT": "11010",
    "MORE": "11011",
    "DROP": "111000",
    "NAT": "111001",
    "POLY": "111010",
    "PIOMEGA": "111011",
    "PSTARSTAR": "111100",
    "PSUM": "111101",
    "T": "1111100",
    "PSM": "1111101",
    "PSTAR": "1111110",
    "JNZF": "11111110",
    "BURY": "11111111",
}
_DECODE = {bits: name for name, bits in CODEWORDS.items()}
MAX_CODEWORD = max(len(bits) for bits in CODEWORDS.values())

APPLY = CODEWORDS["APPLY"]
BASE_OPS = frozenset({
    "HALT", "PUSH0", "PUSH1", "OUT", "JNZB", "DUP", "NEXT", "MORE", "DROP", "JNZF", "BURY",
})
OPERAND_OPS = frozenset({"JNZB", "JNZF"})

TERM, NAT, RHO = "term", "nat", "rho"
HEAD_SLOTS = {
    "NAT": (),
    "POLY": (TERM,),
    "T": (TERM,),
    "PSM": (TERM, TERM),
    "PSUM": (TERM, NAT),
    "PIOMEGA": (TERM, RHO),
    "PSTAR": (TERM, TERM, TERM),
    "PSTARSTAR": (TERM, TERM),
}

C_APPLY = len(APPLY)
C = C_APPLY
C_PRIME = 4
EPSILON = 1


# --- shortlex enumeration -------------------------------------------------

def _check_bits(s):
    if any(b not in "01" for b in s):
        raise DomainError(f"not a bit string: {s!r}")


def nth_string(k):
    """Return l_k, the k-th string in shortlex order starting at l_1 = "0"."""
    if k < 1:
        raise DomainError(f"shortlex index must be >= 1, got {k}")
    return bin(k + 1)[3:]


def index_of(s):
    """Inverse of nth_string."""
    if not s:
        raise DomainError("the empty string has no shortlex index")
    _check_bits(s)
    return int("1" + s, 2) - 1


def emit_number(v):
    """Output string for the number v under num(l_j) = j - 1."""
    return nth_string(v + 1)


def num(s):
    return index_of(s) - 1


# --- integer code (Elias delta of n + 1) ----------------------------------

def _gamma(x):
    n = x.bit_length() - 1
    return "0" * n + "1" + (format(x - (1 << n), f"0{n}b") if n else "")


def encode_nat(n):
    if n < 0:
        raise DomainError(f"cannot encode negative integer {n}")
    x = n + 1
    m = x.bit_length()
    return _gamma(m) + (format(x - (1 << (m - 1)), f"0{m - 1}b") if m > 1 else "")


def nat_length(n):
    """Length of encode_nat(n) without building it."""
    m = (n + 1).bit_length()
    return m + 2 * (m.bit_length() - 1)


def nat_bound(n):
    """C' + log2 N + (1 + epsilon) * log2(log2 N), defined for N >= 2."""
    if n < 2:
        raise DomainError(f"the length bound is stated for N >= 2, got {n}")
    return C_PRIME + math.log2(n) + (1 + EPSILON) * math.log2(math.log2(n))


def read_nat(bits, pos):
    """Decode one integer code starting at ``pos``; return (n, end)."""
    end = len(bits)
    z = pos
    while z < end and bits[z] == "0":
        z += 1
    zeros = z - pos
    if z >= end:
        raise DecodeError(f"truncated integer code at {pos}")
    p = z + 1
    if p + zeros > end:
        raise DecodeError(f"truncated integer code at {pos}")
    m = (1 << zeros) | (int(bits[p:p + zeros], 2) if zeros else 0)
    p += zeros
    if p + m - 1 > end:
        raise DecodeError(f"truncated integer code at {pos}")
    x = (1 << (m - 1)) | (int(bits[p:p + m - 1], 2) if m > 1 else 0)
    return x - 1, p + m - 1


def decode_nat(bits):
    _check_bits(bits)
    n, end = read_nat(bits, 0)
    if end != len(bits):
        raise DecodeError(f"{len(bits) - end} trailing bits after integer code")
    return n


# --- rho blocks -----------------------------------------------------------

def encode_rho(rho, width=None):
    """Emit 0^W 1 m, m being the W-digit mantissa of rho.

    Args:
        rho: Dyadic in [0, 1).
        width: Mantissa width; defaults to the canonical width. Wider
            widths pad with trailing zeros.

    Returns:
        The rho block as a bit string.
    """
    if rho.numerator and rho >= Dyadic.one():
        raise EncodingError("the value 1 has no finite rho block")
    try:
        mantissa = rho.mantissa(width)
    except DomainError as e:
        raise EncodingError(str(e)) from e
    return "0" * len(mantissa) + "1" + mantissa


def read_rho(bits, pos):
    end = len(bits)
    z = pos
    while z < end and bits[z] == "0":
        z += 1
    width = z - pos
    if z >= end or z + 1 + width > end:
        raise DecodeError(f"truncated rho block at {pos}")
    mantissa = bits[z + 1:z + 1 + width]
    return Dyadic(int(mantissa, 2) if mantissa else 0, width), z + 1 + width


def decode_rho(bits):
    """Decode a whole rho block; the result keeps the block's width as exponent."""
    _check_bits(bits)
    rho, end = read_rho(bits, 0)
    if end != len(bits):
        raise DecodeError(f"{len(bits) - end} trailing bits after rho block")
    return rho


# --- parsed forms ---------------------------------------------------------

@dataclass(frozen=True)
class Instr:
    op: str
    operand: int | None = None

    def to_bits(self):
        return CODEWORDS[self.op] + (encode_nat(self.operand) if self.operand is not None else "")


@dataclass(frozen=True)
class BaseProgram:
    ops: tuple

    def slots(self, k):
        return (NAT,) * k

    def to_bits(self):
        return "".join(ins.to_bits() for ins in self.ops)


@dataclass(frozen=True)
class PrimitiveHead:
    head: str
    payload: tuple = ()

    @property
    def arity(self):
        return len(HEAD_SLOTS[self.head])

    @property
    def payload_bits(self):
        if self.head == "NAT":
            return encode_nat(self.payload[0])
        if self.head == "POLY":
            c, k = self.payload
            return encode_nat(c - 1) + encode_nat(k)
        return ""

    def slots(self, k):
        return HEAD_SLOTS[self.head][:k]

    def to_bits(self):
        return CODEWORDS[self.head] + self.payload_bits


@dataclass(frozen=True)
class Apply:
    head: BaseProgram | PrimitiveHead
    args: tuple

    @property
    def saturated(self):
        return isinstance(self.head, BaseProgram) or len(self.args) == self.head.arity

    def to_bits(self):
        return APPLY * len(self.args) + self.head.to_bits() + "".join(self.args)


class _InvalidForm:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INVALID"

    def __bool__(self):
        return False


INVALID = _InvalidForm()


class _NoParse(Exception): ...


def _read_codeword(bits, pos):
    for end in range(pos + 1, min(pos + MAX_CODEWORD, len(bits)) + 1):
        name = _DECODE.get(bits[pos:end])
        if name is not None:
            return name, end
    raise _NoParse(pos)


def _read_nat(bits, pos):
    try:
        return read_nat(bits, pos)
    except DecodeError as e:
        raise _NoParse(pos) from e


def _parse_base(bits, name, p):
    ops = []
    while True:
        if name not in BASE_OPS:
            raise _NoParse(p)
        operand = None
        if name in OPERAND_OPS:
            operand, p = _read_nat(bits, p)
        ops.append(Instr(name, operand))
        if name == "HALT":
            break
        name, p = _read_codeword(bits, p)
    last = len(ops) - 1
    for i, ins in enumerate(ops):
        if ins.op == "JNZB" and i - ins.operand - 1 < 0:
            raise _NoParse(p)
        if ins.op == "JNZF" and i + 2 + ins.operand > last:
            raise _NoParse(p)
    return BaseProgram(tuple(ops)), p


def _parse_head(bits, pos):
    name, p = _read_codeword(bits, pos)
    if name in BASE_OPS:
        return _parse_base(bits, name, p)
    if name == "NAT":
        n, p = _read_nat(bits, p)
        return PrimitiveHead("NAT", (n,)), p
    if name == "POLY":
        c1, p = _read_nat(bits, p)
        k, p = _read_nat(bits, p)
        return PrimitiveHead("POLY", (c1 + 1, k)), p
    if name in HEAD_SLOTS:
        return PrimitiveHead(name), p
    raise _NoParse(pos)


def _skip_slot(bits, pos, kind):
    if kind == TERM:
        return _parse_term(bits, pos)[1]
    if kind == NAT:
        return _read_nat(bits, pos)[1]
    try:
        return read_rho(bits, pos)[1]
    except DecodeError as e:
        raise _NoParse(pos) from e


def _parse_term(bits, pos):
    k = 0
    p = pos
    while bits.startswith(APPLY, p):
        k += 1
        p += C_APPLY
    head, p = _parse_head(bits, p)
    if isinstance(head, PrimitiveHead) and k > head.arity:
        raise _NoParse(p)
    args = []
    for kind in head.slots(k):
        start = p
        p = _skip_slot(bits, p, kind)
        args.append(bits[start:p])
    return (Apply(head, tuple(args)) if k else head), p


@lru_cache(maxsize=1 << 20)
def try_decompose(s):
    """Decompose s into head and arguments, or return INVALID. Total."""
    if not s or any(b not in "01" for b in s):
        return INVALID
    try:
        form, end = _parse_term(s, 0)
    except (_NoParse, RecursionError):
        return INVALID
    return form if end == len(s) else INVALID


def is_valid(s):
    return try_decompose(s) is not INVALID


def encode_apply(head, args=()):
    """Functionalizing concatenation head ∘ a1 ∘ .. ∘ ak.

    Args:
        head: A valid program of L.
        args: Strings filling the head's next argument slots.

    Returns:
        The combined program, of size |head| + sum |ai| + C_APPLY * k.
    """
    args = tuple(args)
    if not is_valid(head):
        raise EncodingError(f"head is not a valid program: {head!r}")
    if not args:
        return head
    result = APPLY * len(args) + head + "".join(args)
    form = try_decompose(result)
    if not isinstance(form, Apply) or form.args[len(form.args) - len(args):] != args:
        raise EncodingError(f"arguments do not fill the slots of {head!r}")
    return result


def encode_base(ops):
    """Encode a base program from op names or (op, operand) pairs."""
    instrs = []
    for op in ops:
        name, operand = (op, None) if isinstance(op, str) else op
        if name not in BASE_OPS:
            raise EncodingError(f"not a base opcode: {name}")
        if (operand is None) == (name in OPERAND_OPS):
            raise EncodingError(f"operand mismatch for {name}")
        instrs.append(Instr(name, operand))
    bits = BaseProgram(tuple(instrs)).to_bits()
    if not is_valid(bits):
        raise EncodingError(f"invalid base program {ops!r}")
    return bits


def nat_literal(n):
    return CODEWORDS["NAT"] + encode_nat(n)


def poly_program(c, k):
    if c < 1 or k < 0:
        raise EncodingError(f"POLY needs c >= 1 and k >= 0, got c={c}, k={k}")
    return CODEWORDS["POLY"] + encode_nat(c - 1) + encode_nat(k)


def head_bits(name):
    if name not in HEAD_SLOTS or name in ("NAT", "POLY"):
        raise EncodingError(f"{name} is not a bare reserved head")
    return CODEWORDS[name]


# --- exhaustive generation ------------------------------------------------

@lru_cache(maxsize=None)
def _nat_codes(length):
    codes = []
    for m in range(1, length + 1):
        if m + 2 * (m.bit_length() - 1) == length:
            codes.extend(encode_nat(x - 1) for x in range(1 << (m - 1), 1 << m))
    return tuple(codes)


@lru_cache(maxsize=None)
def _rho_blocks(size):
    if size % 2 == 0:
        return ()
    width = (size - 1) // 2
    prefix = "0" * width + "1"
    if width == 0:
        return (prefix,)
    return tuple(prefix + format(m, f"0{width}b") for m in range(1 << width))


@lru_cache(maxsize=None)
def _base_tokens(cap):
    fixed = [CODEWORDS[op] for op in sorted(BASE_OPS - OPERAND_OPS - {"HALT"})]
    jumps = [CODEWORDS[op] + encode_nat(n) for op in sorted(OPERAND_OPS) for n in range(cap + 1)]
    return tuple(fixed + jumps)


@lru_cache(maxsize=None)
def _op_runs(size, cap):
    if size == 0:
        return ("",)
    runs = []
    for token in _base_tokens(cap):
        if len(token) <= size:
            runs.extend(token + rest for rest in _op_runs(size - len(token), cap))
    return tuple(runs)


# Jump operands of a valid base program of size s never exceed s // 4.
@lru_cache(maxsize=None)
def _base_candidates(size):
    if size < 1:
        return ()
    return tuple(run + CODEWORDS["HALT"] for run in _op_runs(size - 1, size // 4))


@lru_cache(maxsize=None)
def _primitive_heads(size):
    heads = []
    for name in HEAD_SLOTS:
        cw = CODEWORDS[name]
        rest = size - len(cw)
        if name == "NAT":
            heads.extend((name, cw + code) for code in _nat_codes(rest))
        elif name == "POLY":
            for a in range(1, rest):
                for c1 in _nat_codes(a):
                    heads.extend((name, cw + c1 + k) for k in _nat_codes(rest - a))
        elif rest == 0:
            heads.append((name, cw))
    return tuple(heads)


def _slot_strings(kind, size):
    if kind == TERM:
        return _terms(size)
    if kind == NAT:
        return _nat_codes(size)
    return _rho_blocks(size)


@lru_cache(maxsize=None)
def _seq(kinds, size):
    if not kinds:
        return ("",) if size == 0 else ()
    first, rest = kinds[0], kinds[1:]
    out = []
    for a in range(1, size - len(rest) + 1):
        heads = _slot_strings(first, a)
        if not heads:
            continue
        tails = _seq(rest, size - a)
        out.extend(h + t for h in heads for t in tails)
    return tuple(out)


@lru_cache(maxsize=None)
def _terms(size):
    out = list(_base_candidates(size))
    out.extend(bits for _, bits in _primitive_heads(size))
    for k in range(1, size // C_APPLY + 1):
        rest = size - C_APPLY * k
        prefix = APPLY * k
        for a in range(1, rest):
            arg_bits = rest - a
            bases = _base_candidates(a)
            if bases:
                tails = _seq((NAT,) * k, arg_bits)
                out.extend(prefix + h + t for h in bases for t in tails)
            for name, h in _primitive_heads(a):
                slots = HEAD_SLOTS[name]
                if k <= len(slots):
                    out.extend(prefix + h + t for t in _seq(slots[:k], arg_bits))
    return tuple(out)


@lru_cache(maxsize=64)
def valid_programs(size):
    """Every valid program of exactly ``size`` bits, in shortlex order."""
    if size < 1:
        return ()
    return tuple(sorted({s for s in _terms(size) if try_decompose(s) is not INVALID}))


def valid_count(size):
    return len(valid_programs(size))


# --- candidate counting (upper bounds on valid programs) ------------------

@lru_cache(maxsize=None)
def _count_nat(length):
    return sum(1 << (m - 1) for m in range(1, length + 1)
               if m + 2 * (m.bit_length() - 1) == length)


def _count_rho(size):
    return 1 << ((size - 1) // 2) if size % 2 else 0


@lru_cache(maxsize=None)
def _count_op_runs(size, cap):
    if size == 0:
        return 1
    return sum(_count_op_runs(size - len(t), cap) for t in _base_tokens(cap) if len(t) <= size)


def _count_base(size):
    return _count_op_runs(size - 1, size // 4) if size >= 1 else 0


@lru_cache(maxsize=None)
def _count_primitives(size):
    by_name = {}
    for name in HEAD_SLOTS:
        rest = size - len(CODEWORDS[name])
        if name == "NAT":
            count = _count_nat(rest) if rest > 0 else 0
        elif name == "POLY":
            count = sum(_count_nat(a) * _count_nat(rest - a) for a in range(1, rest))
        else:
            count = 1 if rest == 0 else 0
        if count:
            by_name[name] = count
    return by_name


def _count_slot(kind, size):
    if kind == TERM:
        return candidate_count(size)
    if kind == NAT:
        return _count_nat(size)
    return _count_rho(size)


@lru_cache(maxsize=None)
def _count_seq(kinds, size):
    if not kinds:
        return 1 if size == 0 else 0
    first, rest = kinds[0], kinds[1:]
    return sum(_count_slot(first, a) * _count_seq(rest, size - a)
               for a in range(1, size - len(rest) + 1))


@lru_cache(maxsize=None)
def candidate_count(size):
    """Number of grammar candidates of exactly ``size`` bits.

    Candidates are the parses the generator produces before jump targets
    are checked, so the count bounds the number of valid programs from
    above and their total weight stays below 1.
    """
    if size < 1:
        return 0
    total = _count_base(size) + sum(_count_primitives(size).values())
    for k in range(1, size // C_APPLY + 1):
        rest = size - C_APPLY * k
        for a in range(1, rest):
            total += _count_base(a) * _count_seq((NAT,) * k, rest - a)
            for name, count in _count_primitives(a).items():
                slots = HEAD_SLOTS[name]
                if k <= len(slots):
                    total += count * _count_seq(slots[:k], rest - a)
    return total


def candidate_mass(lo, hi):
    """Total weight sum 2^-s * candidate_count(s) for lo <= s <= hi."""
    mass = Dyadic.zero()
    for s in range(max(lo, 1), hi + 1):
        count = candidate_count(s)
        if count:
            mass = mass + Dyadic(count, s)
    return mass


# --- published constants --------------------------------------------------

def constants_text():
    """Render the codeword table and language constants, one entry per line."""
    lines = ["# language L"]
    for name, bits in CODEWORDS.items():
        lines.append(f"codeword {name} {bits}")
    lines.append(f"constant C {C}")
    lines.append(f"constant C_APPLY {C_APPLY}")
    lines.append(f"constant C_PRIME {C_PRIME}")
    lines.append(f"constant EPSILON {EPSILON}")
    return "\n".join(lines) + "\n"
