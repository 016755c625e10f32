"""Score-style grid layout for the editor.

Every sequence node of the tree gets one lane, in depth-first order, so the
lane of a spawning line sits directly above its branches.  Within a lane,
blocks run left to right and wrap to a new row exactly when the column count
is reached, like bars of sheet music.  A split contributes a connector
anchored at the parent's last block, from which the editor draws the dotted
vertical link down to the branch lanes.

Layout is presentation only; nothing here feeds back into playback.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import Scenagram, Sequence, Split, TimelinePath, iter_sequences


@dataclass(frozen=True)
class Cell:
    row: int
    col: int
    block_index: int


@dataclass(frozen=True)
class Lane:
    path: TimelinePath
    cells: tuple[Cell, ...]


@dataclass(frozen=True)
class Connector:
    spawn_row: int
    spawn_col: int
    child_paths: tuple[TimelinePath, ...]


@dataclass(frozen=True)
class LayoutGrid:
    columns_per_row: int
    lanes: tuple[Lane, ...]
    connectors: tuple[Connector, ...]


DEFAULT_COLUMNS_PER_ROW = 8


def compute_layout(s: Scenagram, columns_per_row: int = DEFAULT_COLUMNS_PER_ROW) -> LayoutGrid:
    if columns_per_row < 1:
        raise ValueError("columns_per_row must be at least 1")
    lanes: list[Lane] = []
    connectors: list[Connector] = []
    for path, seq in iter_sequences(s):
        cells = tuple(
            Cell(i // columns_per_row, i % columns_per_row, i)
            for i in range(len(seq.items))
        )
        lanes.append(Lane(path, cells))
        if isinstance(seq.terminal, Split):
            if seq.items:
                last = len(seq.items) - 1
                spawn_row, spawn_col = divmod(last, columns_per_row)
            else:
                # Split before any block: anchor at the lane origin.
                spawn_row, spawn_col = 0, 0
            connectors.append(
                Connector(
                    spawn_row,
                    spawn_col,
                    tuple(path + (i,) for i in range(len(seq.terminal.branches))),
                )
            )
    return LayoutGrid(columns_per_row, tuple(lanes), tuple(connectors))
