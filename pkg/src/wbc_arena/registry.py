"""Obfuscator registry, addressed by the ids the CLI accepts."""

from __future__ import annotations

import re
from collections.abc import Callable

from .errors import UnknownId
from .obfuscation import Obfuscator, faulty_obfuscator, identity_obfuscator, table_obfuscator
from .schemes import pairing_obfuscator, rerandomizing_obfuscator, wrong_y_obfuscator

_OBFUSCATORS: dict[str, Callable[[], Obfuscator]] = {
    "identity": identity_obfuscator,
    "table": table_obfuscator,
    "pairing": pairing_obfuscator,
    "wrong-y": wrong_y_obfuscator,
    "rerandomize": rerandomizing_obfuscator,
}

_FAULTY = re.compile(r"faulty-(\d*\.?\d+)$")


def get_obfuscator(obfuscator_id: str) -> Obfuscator:
    """Resolve an id; ``faulty-<eps>`` builds the lossy fixture at rate ``eps``."""
    if obfuscator_id in _OBFUSCATORS:
        return _OBFUSCATORS[obfuscator_id]()
    m = _FAULTY.match(obfuscator_id)
    if m and float(m.group(1)) <= 1:
        return faulty_obfuscator(float(m.group(1)))
    raise UnknownId("obfuscator", obfuscator_id)


def obfuscator_ids() -> list[str]:
    return list(_OBFUSCATORS) + ["faulty-<eps>"]
