"""Regenerates the frontend test fixtures from the Python package.

The editor mirrors the grid rule and replays traces instead of computing
them; these fixtures pin the mirror to the real thing.  Run from frontend/:

    python3 scripts/make_fixtures.py

Requires the scenaprod package to be installed (pip install -e ..).
"""

from __future__ import annotations

import json
from dataclasses import asdict
from pathlib import Path

from scenaprod.docformat import Document, LayoutHints, document_to_data, serialize_document
from scenaprod.engine import InputEvent, event_to_data, run_script
from scenaprod.layout import compute_layout
from scenaprod.model import (
    AssetDecl,
    KeySpec,
    PlaySound,
    Scenagram,
    Sequence,
    ShowImage,
    ShowText,
    Split,
    WaitKey,
    generate_random,
)

OUT = Path(__file__).resolve().parent.parent / "tests" / "fixtures"


def tutorial_1() -> Scenagram:
    """Plain sequence: text, image, sound."""
    return Scenagram(
        root=Sequence(
            (
                ShowText("Bienvenue", 1500),
                ShowImage("logo", 2000),
                PlaySound("chime"),
            )
        ),
        assets=(
            AssetDecl("logo", "image", "assets/logo.png"),
            AssetDecl("chime", "sound", "assets/chime.wav", 1200),
        ),
        title="tutoriel-sequence",
    )


def tutorial_2() -> Scenagram:
    """Sequence with a key wait in the middle."""
    return Scenagram(
        root=Sequence(
            (
                ShowText("Appuyez sur Entree", 1000),
                WaitKey(KeySpec("Enter")),
                ShowText("Merci", 1000),
            )
        ),
        title="tutoriel-attente",
    )


def tutorial_3() -> Scenagram:
    """Fork with simultaneous stimuli in different columns."""
    return Scenagram(
        root=Sequence(
            (ShowText("Depart", 800),),
            Split(
                (
                    Sequence((WaitKey(KeySpec("a")), ShowText("A!", 1000))),
                    Sequence((PlaySound("boom"), ShowImage("flash", 500))),
                )
            ),
        ),
        assets=(
            AssetDecl("boom", "sound", "assets/boom.wav", 3000),
            AssetDecl("flash", "image", "assets/flash.png"),
        ),
        title="tutoriel-duplication",
    )


def grid_data(s: Scenagram, cols: int) -> dict:
    return asdict(compute_layout(s, cols))


def wire_events(s: Scenagram, inputs: list[InputEvent], horizon: int) -> list[dict]:
    return [event_to_data(ev) for ev in run_script(s, inputs, horizon).events]


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    tutorials = {
        "tutorial_1_sequence": tutorial_1(),
        "tutorial_2_wait": tutorial_2(),
        "tutorial_3_split": tutorial_3(),
    }
    for name, s in tutorials.items():
        (OUT / f"{name}.scg.json").write_text(
            serialize_document(Document(s, LayoutHints(8))), encoding="utf-8"
        )

    layout_cases = []
    for name, s in tutorials.items():
        for cols in (1, 3, 8):
            layout_cases.append(
                {
                    "name": f"{name}@{cols}",
                    "document": document_to_data(Document(s)),
                    "columns_per_row": cols,
                    "grid": grid_data(s, cols),
                }
            )
    for seed in (3, 11, 42, 77):
        s = generate_random(seed, 20, 3)
        for cols in (2, 8):
            layout_cases.append(
                {
                    "name": f"generated_{seed}@{cols}",
                    "document": document_to_data(Document(s)),
                    "columns_per_row": cols,
                    "grid": grid_data(s, cols),
                }
            )
    (OUT / "layout_cases.json").write_text(
        json.dumps(layout_cases, indent=2, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )

    # Same fork played twice: prompt branch key at 2000, then delayed to 4500.
    # The sibling branch's events must not move; the UI tests replay both.
    s3 = tutorial_3()
    desync = {
        "document": document_to_data(Document(s3)),
        "key": "a",
        "base_key_ms": 2000,
        "delayed_key_ms": 4500,
        "events_base": wire_events(s3, [InputEvent(2000, "a")], 10_000),
        "events_delayed": wire_events(s3, [InputEvent(4500, "a")], 10_000),
    }
    (OUT / "desync_pair.json").write_text(
        json.dumps(desync, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
    )

    s2 = tutorial_2()
    wait_trace = {
        "document": document_to_data(Document(s2)),
        "key": "Enter",
        "key_ms": 2500,
        "events": wire_events(s2, [InputEvent(2500, "Enter")], 10_000),
    }
    (OUT / "wait_trace.json").write_text(
        json.dumps(wait_trace, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
    )
    print(f"wrote fixtures to {OUT}")


if __name__ == "__main__":
    main()
