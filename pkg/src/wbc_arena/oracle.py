"""Lazily sampled random oracle, scoped to one trial.

Families that call the random oracle read the table bound in the current
context, so their evaluators stay plain ``(key, input)`` functions.  Each
experiment run binds a fresh table; nothing is shared across trials.
"""

from __future__ import annotations

from contextlib import contextmanager
from contextvars import ContextVar
from collections.abc import Iterator

from .rng import RngStream

_CURRENT: ContextVar["RandomOracleTable | None"] = ContextVar("wbc_random_oracle", default=None)


class RandomOracleTable:
    def __init__(self, rng: RngStream):
        self._rng = rng
        self._table: dict[tuple[str, int, str], str] = {}

    def __len__(self) -> int:
        return len(self._table)

    def query(self, tag: str, data: str, out_len: int) -> str:
        key = (tag, out_len, data)
        out = self._table.get(key)
        if out is None:
            out = self._rng.bits(out_len)
            self._table[key] = out
        return out


def current_random_oracle() -> RandomOracleTable:
    table = _CURRENT.get()
    if table is None:
        raise RuntimeError("no random oracle bound; wrap the run in bind_random_oracle()")
    return table


@contextmanager
def bind_random_oracle(source: RandomOracleTable | RngStream) -> Iterator[RandomOracleTable]:
    table = source if isinstance(source, RandomOracleTable) else RandomOracleTable(source)
    token = _CURRENT.set(table)
    try:
        yield table
    finally:
        _CURRENT.reset(token)
