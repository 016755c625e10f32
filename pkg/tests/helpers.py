"""Shared corpus construction for cross-check and acceptance tests."""

from __future__ import annotations

from random import Random

from scenaprod.engine import InputEvent, run_script
from scenaprod.model import Scenagram, Split, WaitKey, generate_random, iter_sequences

CORPUS_MAX_BLOCKS = 20
CORPUS_MAX_DEPTH = 3

# Input scripts stay inside this window; horizons are derived per instance.
INPUT_WINDOW_MS = 30_000


def literal_keys(s: Scenagram) -> list[str]:
    keys = set()
    for _, seq in iter_sequences(s):
        for block in seq.items:
            if isinstance(block, WaitKey) and block.key.key is not None:
                keys.add(block.key.key)
    return sorted(keys)


def random_inputs(s: Scenagram, seed: int) -> list[InputEvent]:
    """Seeded key script biased toward keys the scenagram actually waits on."""
    rng = Random(seed * 7919 + 17)
    pool = literal_keys(s) * 3 + ["a", "Enter", "zz"]
    n = rng.randint(0, 8)
    times = sorted(set(rng.randrange(0, INPUT_WINDOW_MS) for _ in range(n)))
    return [InputEvent(t, rng.choice(pool)) for t in times]


def pick_horizon(s: Scenagram, inputs: list[InputEvent]) -> int:
    """A horizon safely past all activity, found with a generous probe run."""
    probe = run_script(s, inputs, INPUT_WINDOW_MS + 90_000)
    last = probe.events[-1].time_ms if probe.events else 0
    if inputs:
        last = max(last, inputs[-1].time_ms)
    return last + 500


def corpus_instance(seed: int) -> tuple[Scenagram, list[InputEvent], int]:
    s = generate_random(seed, CORPUS_MAX_BLOCKS, CORPUS_MAX_DEPTH)
    inputs = random_inputs(s, seed)
    return s, inputs, pick_horizon(s, inputs)


def has_split(s: Scenagram) -> bool:
    return isinstance(s.root.terminal, Split)
