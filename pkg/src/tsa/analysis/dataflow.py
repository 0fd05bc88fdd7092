"""Forward worklist solver over a CFG."""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Callable


@dataclass
class Fixpoint:
    inputs: list  # state flowing into each node (None = unreachable)
    outputs: list
    iterations: int


def forward_fixpoint(cfg, entry_state, transfer: Callable, join: Callable) -> Fixpoint:
    """Iterate ``transfer`` to a fixpoint, visiting nodes in reverse post-order.

    ``join`` merges two predecessor outputs; ``transfer(node, state)`` must
    not mutate ``state``.
    """
    rank = {n: i for i, n in enumerate(cfg.reverse_postorder())}
    outputs = [None] * len(cfg.nodes)

    def input_of(n):
        if n == cfg.entry:
            return entry_state
        acc = None
        for p in cfg.pred[n]:
            o = outputs[p]
            if o is not None:
                acc = o if acc is None else join(acc, o)
        return acc

    heap = [(rank[cfg.entry], cfg.entry)]
    queued = {cfg.entry}
    steps = 0
    while heap:
        _, n = heapq.heappop(heap)
        queued.discard(n)
        steps += 1
        inp = input_of(n)
        if inp is None:
            continue
        out = transfer(cfg.nodes[n], inp)
        if out != outputs[n]:
            outputs[n] = out
            for s in cfg.succ[n]:
                if s not in queued:
                    queued.add(s)
                    heapq.heappush(heap, (rank[s], s))
    inputs = [input_of(n) for n in range(len(cfg.nodes))]
    return Fixpoint(inputs, outputs, steps)
