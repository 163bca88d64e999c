import threading
from contextlib import contextmanager


class MemoStore:
    """A single logically consistent map with atomic get-or-compute.

    The compute callback runs outside the lock, so two threads may compute
    the same key; the first stored value wins and both callers receive it.
    """

    def __init__(self):
        self._data = {}
        self._lock = threading.Lock()
        self.enabled = True
        self.hits = 0
        self.misses = 0

    def get_or_compute(self, key, compute):
        if not self.enabled:
            return compute()
        with self._lock:
            if key in self._data:
                self.hits += 1
                return self._data[key]
        value = compute()
        with self._lock:
            self.misses += 1
            return self._data.setdefault(key, value)

    def forget(self, spec):
        """Drop every entry computed for the time function ``spec``."""
        with self._lock:
            for key in [k for k in self._data if k[1] == spec]:
                del self._data[key]

    def clear(self):
        with self._lock:
            self._data.clear()
            self.hits = 0
            self.misses = 0

    @contextmanager
    def disabled(self):
        """Bypass the store for the duration of the block."""
        previous = self.enabled
        self.enabled = False
        try:
            yield self
        finally:
            self.enabled = previous

    def __len__(self):
        with self._lock:
            return len(self._data)

    def __contains__(self, key):
        with self._lock:
            return key in self._data


MEMO = MemoStore()
