"""Counter-based deterministic random stream.

Every draw is a pure function of (seed, counter), so the stream state is two
integers that can be stored on a game state, serialized, and replayed
bit-exactly.  Uses the splitmix64 mixing function.
"""
from __future__ import annotations

from dataclasses import dataclass

_MASK = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK
    return (x ^ (x >> 31)) & _MASK


@dataclass(slots=True)
class Rng:
    """Seeded stream; ``counter`` advances by one per draw."""

    seed: int
    counter: int = 0

    def next_uint(self) -> int:
        value = _splitmix64((self.seed & _MASK) ^ _splitmix64(self.counter))
        self.counter += 1
        return value

    def randrange(self, n: int) -> int:
        if n <= 0:
            raise ValueError("randrange needs n >= 1")
        # 64-bit draws make modulo bias negligible for game-sized n.
        return self.next_uint() % n

    def choice(self, seq):
        return seq[self.randrange(len(seq))]

    def uniform(self) -> float:
        return self.next_uint() / float(1 << 64)

    def state(self) -> tuple[int, int]:
        return (self.seed, self.counter)

    @classmethod
    def from_state(cls, state: tuple[int, int]) -> "Rng":
        return cls(seed=state[0], counter=state[1])
