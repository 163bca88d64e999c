"""Exhaustive sweeps of L under a time function, with an on-disk record cache.

Cache layout under the cache root::

    manifest.json                 format_version, fingerprint, strata flags
    <time_fn>/size-<s>.log        one record log per (time function, size)

A record log starts with the 6-byte header ``b"SRLG" version width`` and
then holds fixed-width big-endian records::

    u8   program length in bits
    u64  program bits as an integer
    u64  time bound
    u64  steps (bound when the program did not halt in time)
    u8   1 if halted within the bound
    width bytes  shortlex index of the raw output (0 when not halted)

A stratum is written to a temporary file and moved into place before the
manifest marks it complete.
"""
import hashlib
import itertools
import json
import os
import shutil
import struct
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path

from joblib import Parallel, delayed
from tqdm import tqdm

from subrecursive.codec import (
    INVALID,
    constants_text,
    encode_apply,
    index_of,
    try_decompose,
    valid_count,
    valid_programs,
)
from subrecursive.config import get_capacity, set_capacity
from subrecursive.dyadic import Dyadic
from subrecursive.errors import CacheError
from subrecursive.log import get_logger
from subrecursive.memo import MEMO
from subrecursive.omega import check_capacity
from subrecursive.submachine import TimeFn, evaluate
from subrecursive.vm import Fuel, Halted, run, schedule_text

logger = get_logger(__name__)

FORMAT_VERSION = 1
MAGIC = b"SRLG"
_HEADER = struct.Struct(">4sBB")
_RECORD = struct.Struct(">BQQQB")
CHUNK = 512


@dataclass(frozen=True, order=True)
class RunRecord:
    program: str
    time_fn_id: str
    bound: int
    halted_in_bound: bool
    output_index: int
    steps: int

    @property
    def sort_key(self):
        return len(self.program), self.program


def fingerprint():
    """SHA-256 of the published codeword table and cost schedule."""
    return hashlib.sha256((constants_text() + schedule_text()).encode()).hexdigest()


def record_for(tf, p):
    ev = evaluate(tf, p)
    return RunRecord(p, tf.spec, ev.bound, ev.halted, ev.output_index, ev.steps)


def _evaluate_chunk(spec, programs, capacity):
    set_capacity(capacity)
    tf = TimeFn.parse(spec)
    return [record_for(tf, p) for p in programs]


# --- record log codec -------------------------------------------------------

def encode_records(records):
    width = max((max(r.output_index, 1).bit_length() + 7) // 8 for r in records) if records else 1
    out = bytearray(_HEADER.pack(MAGIC, FORMAT_VERSION, width))
    for r in records:
        out += _RECORD.pack(len(r.program), int(r.program, 2), r.bound, r.steps,
                            1 if r.halted_in_bound else 0)
        out += r.output_index.to_bytes(width, "big")
    return bytes(out)


def decode_records(data, spec):
    if len(data) < _HEADER.size:
        raise CacheError("record log shorter than its header")
    magic, version, width = _HEADER.unpack_from(data)
    if magic != MAGIC or version != FORMAT_VERSION:
        raise CacheError(f"unsupported record log (magic {magic!r}, version {version})")
    size = _RECORD.size + width
    body = data[_HEADER.size:]
    if len(body) % size:
        raise CacheError("truncated record log")
    records = []
    for offset in range(0, len(body), size):
        length, bits, bound, steps, halted = _RECORD.unpack_from(body, offset)
        output = int.from_bytes(body[offset + _RECORD.size:offset + size], "big")
        records.append(RunRecord(format(bits, f"0{length}b"), spec, bound, bool(halted), output, steps))
    return records


def records_bytes(records):
    """Canonical byte image of a record set, sorted by (size, program)."""
    return encode_records(sorted(records, key=lambda r: r.sort_key))


# --- cache ------------------------------------------------------------------

def _dirname(spec):
    return spec.replace(":", "_").replace(",", "-")


class RecordCache:
    def __init__(self, root):
        self.root = Path(root)
        self.manifest_path = self.root / "manifest.json"
        self.lock_path = self.root / ".lock"
        self._manifest = None

    @contextmanager
    def locked(self):
        """Hold the advisory lock file for the duration of the block."""
        self.root.mkdir(parents=True, exist_ok=True)
        try:
            fd = os.open(self.lock_path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError as e:
            raise CacheError(f"cache {self.root} is in use (remove {self.lock_path} if stale)") from e
        try:
            os.write(fd, str(os.getpid()).encode())
            os.close(fd)
            yield self
        finally:
            self.lock_path.unlink(missing_ok=True)

    def _fresh(self):
        return {"format_version": FORMAT_VERSION, "fingerprint": fingerprint(), "strata": {}}

    @property
    def manifest(self):
        if self._manifest is None:
            self._manifest = self._load()
        return self._manifest

    def _load(self):
        if not self.manifest_path.exists():
            return self._fresh()
        try:
            with open(self.manifest_path, "r") as f:
                manifest = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise CacheError(f"unreadable manifest {self.manifest_path}: {e}") from e
        if (manifest.get("fingerprint") != fingerprint()
                or manifest.get("format_version") != FORMAT_VERSION):
            logger.warning("cache %s was built for another language or schedule; wiping it", self.root)
            self.wipe()
            return self._fresh()
        return manifest

    def wipe(self):
        for child in self.root.iterdir() if self.root.exists() else ():
            if child.is_dir():
                shutil.rmtree(child)
            elif child.name != self.lock_path.name:
                child.unlink()
        self._manifest = self._fresh()

    def stratum_path(self, spec, size):
        return self.root / _dirname(spec) / f"size-{size:03d}.log"

    def is_complete(self, spec, size):
        entry = self.manifest["strata"].get(spec, {}).get(str(size))
        return bool(entry and entry["complete"])

    def read(self, spec, size):
        if not self.is_complete(spec, size):
            return None
        try:
            data = self.stratum_path(spec, size).read_bytes()
        except OSError as e:
            raise CacheError(f"missing record log for {spec} size {size}: {e}") from e
        return decode_records(data, spec)

    def write(self, spec, size, records):
        expected = valid_count(size)
        if len(records) != expected:
            raise CacheError(f"stratum {spec}/{size} has {len(records)} records, expected {expected}")
        path = self.stratum_path(spec, size)
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".tmp")
        try:
            tmp.write_bytes(encode_records(records))
            os.replace(tmp, path)
        except OSError as e:
            tmp.unlink(missing_ok=True)
            raise CacheError(f"cannot write {path}: {e}") from e
        self.manifest["strata"].setdefault(spec, {})[str(size)] = {
            "complete": True, "records": len(records)}
        self._save()

    def _save(self):
        tmp = self.manifest_path.with_suffix(".tmp")
        with open(tmp, "w") as f:
            json.dump(self.manifest, f, indent=2, sort_keys=True)
        os.replace(tmp, self.manifest_path)


# --- sweep ------------------------------------------------------------------

def _stratum_records(tf, size, workers, backend, chunk):
    programs = valid_programs(size)
    if workers <= 1 or len(programs) <= chunk:
        return [record_for(tf, p) for p in programs]
    chunks = [programs[i:i + chunk] for i in range(0, len(programs), chunk)]
    capacity = get_capacity()
    parts = Parallel(n_jobs=workers, backend=backend)(
        delayed(_evaluate_chunk)(tf.spec, part, capacity) for part in chunks)
    return sorted(itertools.chain.from_iterable(parts), key=lambda r: r.sort_key)


def sweep(tf, n, cache=None, workers=1, progress=False, backend=None, chunk=CHUNK):
    """One RunRecord per valid program of every size 1..n.

    Args:
        tf: Time function of the submachine.
        n: Largest program size.
        cache: Optional RecordCache; complete strata are read back, missing
            ones are computed and written.
        workers: joblib worker count.
        progress: Show a tqdm bar over the strata.
        backend: joblib backend override.
        chunk: Programs per joblib task.

    Returns:
        Records sorted by (size, program), identical for any worker count.
    """
    check_capacity(n)
    records = []
    for size in tqdm(range(1, n + 1), desc=f"sweep {tf.spec}", disable=not progress):
        stratum = cache.read(tf.spec, size) if cache is not None else None
        if stratum is None:
            stratum = _stratum_records(tf, size, workers, backend, chunk)
            if cache is not None:
                cache.write(tf.spec, size, stratum)
        logger.debug("size %d: %d records", size, len(stratum))
        records.extend(stratum)
    logger.info("swept %s up to %d bits: %d records (memo: %d entries, %d hits, %d misses)",
                tf.spec, n, len(records), len(MEMO), MEMO.hits, MEMO.misses)
    return records


def records_psum(records, n):
    total = Dyadic.zero()
    for r in records:
        if r.halted_in_bound and len(r.program) <= n:
            total = total + Dyadic.unit(len(r.program))
    return total


def records_bb(records, n):
    return max((r.output_index for r in records if r.halted_in_bound and len(r.program) <= n),
               default=0)


# --- oracle -----------------------------------------------------------------

def _oracle_records(tf, n):
    records = []
    for size in range(1, n + 1):
        for bits in itertools.product("01", repeat=size):
            w = "".join(bits)
            if try_decompose(w) is INVALID:
                continue
            bound = index_of(run(encode_apply(tf.program, [w])).output) - 1
            outcome = run(w, Fuel(bound))
            if isinstance(outcome, Halted):
                records.append(RunRecord(w, tf.spec, bound, True, index_of(outcome.output), outcome.steps))
            else:
                records.append(RunRecord(w, tf.spec, bound, False, 0, bound))
    return records


def oracle_check(tf, n, cache=None, workers=1):
    """Recompute level n by brute force over all strings and compare.

    The oracle parses every string of each size, obtains the time bound by
    running tf's program on U and runs the candidate under that fuel, never
    touching the record cache or the shared memo.
    """
    check_capacity(n)
    pipeline = {r.program: r for r in sweep(tf, n, cache=cache, workers=workers)}
    with MEMO.disabled():
        oracle = {r.program: r for r in _oracle_records(tf, n)}
    mismatches = sorted(
        set(pipeline) ^ set(oracle)
        | {p for p in set(pipeline) & set(oracle) if pipeline[p] != oracle[p]},
        key=lambda p: (len(p), p),
    )
    pipe_psum, oracle_psum = records_psum(pipeline.values(), n), records_psum(oracle.values(), n)
    pipe_bb, oracle_bb = records_bb(pipeline.values(), n), records_bb(oracle.values(), n)
    passed = not mismatches and pipe_psum == oracle_psum and pipe_bb == oracle_bb
    if mismatches:
        logger.error("oracle mismatch on %d programs, first %s", len(mismatches), mismatches[0])
    return {
        "time_fn": tf.spec,
        "N": n,
        "passed": passed,
        "psum": str(pipe_psum),
        "oracle_psum": str(oracle_psum),
        "bb": pipe_bb,
        "oracle_bb": oracle_bb,
        "bb_plus": pipe_bb + 1,
        "oracle_bb_plus": oracle_bb + 1,
        "mismatches": mismatches,
    }
