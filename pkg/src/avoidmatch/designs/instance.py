"""Plain data records shared by the builders, the pipeline and the verifiers.

Points of a design are ``0 .. n-1``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence


@dataclass(frozen=True)
class DesignInstance:
    n: int
    q: int
    r: int
    g: int
    blocks: tuple[tuple[int, ...], ...]
    provenance: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not (self.q > self.r >= 2):
            raise ValueError("need q > r >= 2")
        blocks = tuple(tuple(sorted(int(x) for x in b)) for b in self.blocks)
        for b in blocks:
            if len(b) != self.q or len(set(b)) != self.q:
                raise ValueError(f"block {b} does not have {self.q} distinct points")
            if b[0] < 0 or b[-1] >= self.n:
                raise ValueError(f"block {b} has a point outside [0, {self.n})")
        object.__setattr__(self, "blocks", blocks)

    def to_dict(self) -> dict:
        return {
            "n": self.n, "q": self.q, "r": self.r, "g": self.g,
            "blocks": [list(b) for b in self.blocks],
            "provenance": self.provenance,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DesignInstance":
        return cls(data["n"], data["q"], data["r"], data.get("g", 2), tuple(map(tuple, data["blocks"])),
                   data.get("provenance", {}))

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


@dataclass(frozen=True)
class EdgeColoring:
    """Color of every G-edge; colors are ``0 .. num_colors-1``."""

    colors: tuple[int, ...]
    num_colors: int | None = None

    def __post_init__(self):
        colors = tuple(int(c) for c in self.colors)
        if any(c < 0 for c in colors):
            raise ValueError("colors must be nonnegative")
        k = self.num_colors if self.num_colors is not None else (max(colors) + 1 if colors else 0)
        if colors and max(colors) >= k:
            raise ValueError("color id exceeds num_colors")
        object.__setattr__(self, "colors", colors)
        object.__setattr__(self, "num_colors", int(k))

    def to_dict(self) -> dict:
        return {"colors": list(self.colors)}

    @classmethod
    def from_dict(cls, data: dict) -> "EdgeColoring":
        return cls(tuple(data["colors"]), data.get("num_colors"))


@dataclass(frozen=True)
class ListAssignment:
    lists: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        lists = tuple(tuple(sorted(set(int(c) for c in l))) for l in self.lists)
        if any(not l for l in lists):
            raise ValueError("every list must be nonempty")
        object.__setattr__(self, "lists", lists)

    @property
    def palette(self) -> tuple[int, ...]:
        return tuple(sorted({c for l in self.lists for c in l}))

    def to_dict(self) -> dict:
        return {"lists": [list(l) for l in self.lists]}

    @classmethod
    def from_dict(cls, data: dict) -> "ListAssignment":
        return cls(tuple(tuple(l) for l in data["lists"]))


def blocks_from_ids(table, ids: Sequence[int]) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(int(x) for x in table[i]) for i in ids)
