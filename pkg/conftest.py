import pytest

from subrecursive.config import get_capacity, set_capacity
from subrecursive.enumerator import RecordCache
from subrecursive.memo import MEMO
from subrecursive.submachine import TimeFn


@pytest.fixture
def fresh_memo():
    MEMO.clear()
    yield MEMO
    MEMO.clear()


@pytest.fixture(autouse=True)
def restore_capacity():
    capacity = get_capacity()
    yield
    set_capacity(capacity)


@pytest.fixture
def poly21():
    return TimeFn.poly(2, 1)


@pytest.fixture
def poly10():
    return TimeFn.poly(1, 0)


@pytest.fixture
def diag21(poly21):
    return TimeFn.diagonal(poly21)


@pytest.fixture
def tmp_cache(tmp_path):
    return RecordCache(tmp_path / "cache")
