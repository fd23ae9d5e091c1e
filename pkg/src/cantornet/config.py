from __future__ import annotations

import os
from dataclasses import dataclass

ENV_MAX_K = "CANTORNET_MAX_K"


@dataclass(frozen=True)
class Caps:
    """Upper bounds on the recursion level accepted by the CLI."""

    recursive: int = 12
    dnf: int = 8

    @classmethod
    def from_env(cls, override: int | None = None) -> "Caps":
        if override is not None:
            return cls(override, override)
        raw = os.environ.get(ENV_MAX_K)
        if raw:
            value = int(raw)
            return cls(value, value)
        return cls()

    def for_repr(self, repr_name: str) -> int:
        return self.recursive if repr_name == "recursive" else self.dnf
