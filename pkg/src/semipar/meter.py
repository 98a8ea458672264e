"""Abstract work and round accounting.

Work is charged at one unit per element touched per bulk phase, so the
linear-work claims can be checked independently of interpreter or hardware
speed.  Each barrier-separated bulk phase contributes to the round counter;
a primitive of logarithmic depth charges logarithmically many rounds.
"""

from __future__ import annotations


class WorkMeter:
    """Monotone counters of charged operations, split by phase label.

    Increments are plain integer additions under the GIL, so concurrent
    bulk phases never lose counts; only totals are ever observed.
    """

    __slots__ = ("phase_breakdown", "rounds")

    def __init__(self) -> None:
        self.phase_breakdown: dict[str, int] = {}
        self.rounds: int = 0

    @property
    def total_ops(self) -> int:
        return sum(self.phase_breakdown.values())

    def charge(self, label: str, ops: int) -> None:
        if ops < 0:
            raise ValueError("charged ops must be non-negative")
        self.phase_breakdown[label] = self.phase_breakdown.get(label, 0) + int(ops)

    def tick(self, rounds: int = 1) -> None:
        if rounds < 0:
            raise ValueError("rounds must be non-negative")
        self.rounds += int(rounds)

    def merge(self, other: "WorkMeter") -> None:
        for label, ops in other.phase_breakdown.items():
            self.charge(label, ops)
        self.rounds += other.rounds

    def snapshot(self) -> dict[str, int]:
        return dict(self.phase_breakdown)

    def __repr__(self) -> str:
        return f"WorkMeter(total_ops={self.total_ops}, rounds={self.rounds})"
