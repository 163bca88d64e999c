import dataclasses
import json

import pytest

from subrecursive.beaver import bb
from subrecursive.codec import valid_count
from subrecursive.enumerator import (
    RecordCache,
    RunRecord,
    decode_records,
    encode_records,
    fingerprint,
    oracle_check,
    records_bb,
    records_bytes,
    records_psum,
    sweep,
)
from subrecursive.errors import CacheError
from subrecursive.memo import MEMO
from subrecursive.omega import psum
from subrecursive.submachine import TimeFn


def test_first_stratum(poly21):
    assert sweep(poly21, 1) == [RunRecord("0", "poly:2,1", 6, True, 1, 1)]


def test_one_record_per_valid_program(poly21):
    records = sweep(poly21, 9)
    for size in range(1, 10):
        assert sum(len(r.program) == size for r in records) == valid_count(size)
    assert [r.sort_key for r in records] == sorted(r.sort_key for r in records)


def test_records_agree_with_psum_and_bb(poly21):
    records = sweep(poly21, 9)
    for n in range(10):
        assert records_psum(records, n) == psum(poly21, n)
        assert records_bb(records, n) == bb(poly21, n)


def test_worker_count_does_not_change_the_bytes(poly21):
    serial = sweep(poly21, 10)
    threaded = sweep(poly21, 10, workers=4, backend="threading", chunk=16)
    assert records_bytes(serial) == records_bytes(threaded)


def test_cache_round_trip(poly21, tmp_cache):
    first = sweep(poly21, 7, cache=tmp_cache)
    assert all(tmp_cache.is_complete("poly:2,1", s) for s in range(1, 8))
    assert tmp_cache.stratum_path("poly:2,1", 3).name == "size-003.log"
    assert tmp_cache.stratum_path("poly:2,1", 3).parent.name == "poly_2-1"

    reopened = RecordCache(tmp_cache.root)
    assert reopened.manifest["fingerprint"] == fingerprint()
    assert sweep(poly21, 7, cache=reopened) == first


def test_stale_fingerprint_wipes_the_cache(poly21, tmp_cache):
    sweep(poly21, 4, cache=tmp_cache)
    manifest = json.loads(tmp_cache.manifest_path.read_text())
    manifest["fingerprint"] = "0" * 64
    tmp_cache.manifest_path.write_text(json.dumps(manifest))

    reopened = RecordCache(tmp_cache.root)
    assert not reopened.is_complete("poly:2,1", 1)
    assert not tmp_cache.stratum_path("poly:2,1", 1).exists()


def test_record_log_codec(poly21):
    stratum = [r for r in sweep(poly21, 9) if len(r.program) == 9]
    data = encode_records(stratum)
    assert data[:4] == b"SRLG"
    assert decode_records(data, "poly:2,1") == stratum


def test_damaged_record_logs(poly21):
    data = encode_records(sweep(poly21, 3))
    with pytest.raises(CacheError):
        decode_records(b"XXXX" + data[4:], "poly:2,1")
    with pytest.raises(CacheError):
        decode_records(data + b"\x00", "poly:2,1")
    with pytest.raises(CacheError):
        decode_records(data[:3], "poly:2,1")


def test_cache_lock_is_exclusive(tmp_cache):
    with tmp_cache.locked():
        assert tmp_cache.lock_path.exists()
        with pytest.raises(CacheError):
            with tmp_cache.locked():
                pass
    assert not tmp_cache.lock_path.exists()


def test_incomplete_stratum_is_refused(tmp_cache):
    with pytest.raises(CacheError):
        tmp_cache.write("poly:2,1", 1, [])
    assert not tmp_cache.is_complete("poly:2,1", 1)


def test_oracle_at_level_zero(poly21):
    report = oracle_check(poly21, 0)
    assert report["passed"]
    assert report["psum"] == "0"
    assert report["bb"] == 0
    assert report["bb_plus"] == 1


def test_oracle_agrees_with_the_sweep(poly21, tmp_cache):
    report = oracle_check(poly21, 10, cache=tmp_cache)
    assert report["passed"], report["mismatches"]
    assert report["psum"] == report["oracle_psum"] == str(psum(poly21, 10))
    assert report["bb_plus"] == report["oracle_bb_plus"]


def test_oracle_catches_a_corrupted_record(poly21, tmp_cache):
    sweep(poly21, 8, cache=tmp_cache)
    stratum = tmp_cache.read("poly:2,1", 5)
    target = next(r for r in stratum if r.halted_in_bound)
    damaged = [dataclasses.replace(r, output_index=r.output_index + 7) if r == target else r
               for r in stratum]
    tmp_cache.write("poly:2,1", 5, damaged)

    report = oracle_check(poly21, 8, cache=tmp_cache)
    assert not report["passed"]
    assert target.program in report["mismatches"]


def test_oracle_ignores_a_poisoned_memo(poly10, fresh_memo):
    MEMO.get_or_compute(("tb", "poly:1,0", "101010100"), lambda: (50, 4))
    report = oracle_check(poly10, 9)
    assert not report["passed"]
    assert "101010100" in report["mismatches"]


@pytest.mark.parametrize("spec", ["poly:2,1", "poly:1,2", "diag:poly:2,1"])
def test_oracle_across_time_functions(spec, fresh_memo):
    report = oracle_check(TimeFn.parse(spec), 9)
    assert report["passed"], report["mismatches"]


@pytest.mark.parametrize("spec", ["poly:2,1", "diag:poly:2,1"])
def test_sweep_bytes_survive_a_cold_memo(spec, fresh_memo):
    tf = TimeFn.parse(spec)
    warm = records_bytes(sweep(tf, 9))
    MEMO.clear()
    assert records_bytes(sweep(tf, 9)) == warm
