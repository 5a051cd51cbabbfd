"""
Height normalization for state deduplication.

Heights up to the anchor (the larger of b0 and every absolute lock) are kept as they
are. Above the anchor only distances matter, and no distance beyond the gap is ever
compared, so longer stretches between consecutive heights are shortened to the gap.
The gap is one more than the largest relative lock or confirmation delay, widened by
the reorg depth so that clocks restored by a reorg still saturate.

Confirmations at or below the reorg depth under the current height can no longer be
reverted and are dropped from the history.

The normalized state fires exactly the same steps, and the delays it offers have the
same lengths.
"""

from dataclasses import dataclass

from src.semantics.state import (
    Confirmation,
    ExecutionParams,
    PoolEntry,
    TraceNetState,
    sorted_history,
)
from src.tracenet.net import TraceNet


@dataclass(frozen=True)
class Horizon:
    anchor: int
    gap: int
    depth: int = 0

    @classmethod
    def for_net(cls, net: TraceNet, params: ExecutionParams) -> "Horizon":
        anchor = max([net.b0, *net.after_bounds])
        gap = (
            1
            + max([*net.older_bounds, params.conf_delay_int, params.conf_delay_ext])
            + params.reorg_depth
        )
        return cls(anchor, gap, params.reorg_depth)

    def _height_map(self, heights: set[int]) -> dict[int, int]:
        mapping = {h: h for h in heights if h <= self.anchor}
        previous = new_previous = self.anchor
        for h in sorted(h for h in heights if h > self.anchor):
            new_previous += min(h - previous, self.gap)
            mapping[h] = new_previous
            previous = h
        return mapping

    def revertible(self, z: TraceNetState) -> tuple[Confirmation, ...]:
        """History entries a reorg of at most ``depth`` blocks can still revert."""
        return tuple(c for c in z.history if c.height > z.height - self.depth)

    def normalize(self, z: TraceNetState) -> TraceNetState:
        history = self.revertible(z)
        heights = {z.height}
        heights.update(h for _, h in z.arrivals)
        heights.update(c.height for c in history)
        heights.update(h for c in history for _, h in c.spent)
        heights.update(entry.height for entry in z.pool)
        mapping = self._height_map(heights)
        if history == z.history and all(k == v for k, v in mapping.items()):
            return z
        return TraceNetState(
            k_int=z.k_int,
            k_ext=z.k_ext,
            height=mapping[z.height],
            marking=z.marking,
            arrivals=tuple((p, mapping[h]) for p, h in z.arrivals),
            history=sorted_history(
                Confirmation(
                    c.transition,
                    mapping[c.height],
                    tuple((p, mapping[h]) for p, h in c.spent),
                )
                for c in history
            ),
            pool=tuple(
                PoolEntry(e.transition, e.actor, mapping[e.height]) for e in z.pool
            ),
        )

    def saturation_delay(self, z: TraceNetState) -> int:
        """A delay after which every clock and confirmation wait has run out."""
        return max(0, self.anchor - z.height) + self.gap
