"""Physical constants carried through the numerics (natural units by default)."""
from __future__ import annotations

from dataclasses import dataclass

from ._validation import check_positive


@dataclass(frozen=True)
class Units:
    hbar: float = 1.0
    c: float = 1.0

    def __post_init__(self):
        check_positive(self.hbar, "hbar")
        check_positive(self.c, "c")


NATURAL = Units()
