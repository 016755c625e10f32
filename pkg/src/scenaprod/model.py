"""Scenagram domain model.

A scenagram is a tree of block sequences.  Each sequence runs its blocks in
order and then either ends or splits into several parallel branches, each an
autonomous line of time.  There are no loops, no conditions and no joins, so
the tree structure is the whole story: every sequence node corresponds to
exactly one timeline that may exist during playback.

This module holds the value types, structural validation, path resolution
over the tree, and a seeded random generator used to build test corpora.
"""

from __future__ import annotations

from dataclasses import dataclass
from random import Random

FORMAT_VERSION = 1

SOUND = "sound"
IMAGE = "image"

# Index sequence selecting a branch at each split; () names the root timeline.
TimelinePath = tuple[int, ...]


@dataclass(frozen=True)
class AssetDecl:
    """A declared media asset; sounds carry their fixed duration."""

    id: str
    kind: str
    uri: str
    declared_duration_ms: int | None = None


@dataclass(frozen=True)
class KeySpec:
    """Key filter for a wait block: a literal key name, or None for any key."""

    key: str | None = None

    def matches(self, pressed: str) -> bool:
        return self.key is None or self.key == pressed


ANY_KEY = KeySpec(None)


@dataclass(frozen=True)
class ShowText:
    text: str
    duration_ms: int


@dataclass(frozen=True)
class ShowImage:
    asset_id: str
    duration_ms: int


@dataclass(frozen=True)
class PlaySound:
    asset_id: str


@dataclass(frozen=True)
class WaitKey:
    key: KeySpec


Block = ShowText | ShowImage | PlaySound | WaitKey


@dataclass(frozen=True)
class End:
    """Terminal: the line simply stops here."""


@dataclass(frozen=True)
class Split:
    """Terminal: the line forks into parallel autonomous branches."""

    branches: tuple["Sequence", ...]


Terminal = End | Split


@dataclass(frozen=True)
class Sequence:
    items: tuple[Block, ...] = ()
    terminal: Terminal = End()


@dataclass(frozen=True)
class Scenagram:
    root: Sequence
    assets: tuple[AssetDecl, ...] = ()
    title: str = ""
    version: int = FORMAT_VERSION


@dataclass(frozen=True)
class Violation:
    """One validation finding, anchored to a document position."""

    code: str
    path: str
    message: str


class PathError(Exception):
    """A timeline path does not name a sequence of the tree."""

    code = "PATH_OUT_OF_RANGE"

    def __init__(self, message: str) -> None:
        super().__init__(message)
        self.message = message


def iter_sequences(s: Scenagram) -> list[tuple[TimelinePath, Sequence]]:
    """All sequence nodes with their paths, depth-first, branches in order."""
    out: list[tuple[TimelinePath, Sequence]] = []
    stack: list[tuple[TimelinePath, Sequence]] = [((), s.root)]
    while stack:
        path, seq = stack.pop()
        out.append((path, seq))
        if isinstance(seq.terminal, Split):
            for i in reversed(range(len(seq.terminal.branches))):
                stack.append((path + (i,), seq.terminal.branches[i]))
    return out


def resolve_path(s: Scenagram, p: TimelinePath) -> Sequence:
    """Follow branch indices from the root; raises PathError off the tree."""
    seq = s.root
    for depth, idx in enumerate(p):
        term = seq.terminal
        if not isinstance(term, Split):
            raise PathError(f"path {list(p)}: no split at depth {depth}")
        if not 0 <= idx < len(term.branches):
            raise PathError(
                f"path {list(p)}: branch {idx} out of range at depth {depth}"
            )
        seq = term.branches[idx]
    return seq


def leaf_paths(s: Scenagram) -> list[TimelinePath]:
    """Paths of all leaf timelines, lexicographic; [()] when there is no split."""
    leaves: list[TimelinePath] = []

    def walk(path: TimelinePath, seq: Sequence) -> None:
        if isinstance(seq.terminal, Split):
            for i, branch in enumerate(seq.terminal.branches):
                walk(path + (i,), branch)
        else:
            leaves.append(path)

    walk((), s.root)
    return leaves


def _seq_pos(path: TimelinePath) -> str:
    pos = "root"
    for idx in path:
        pos += f".terminal.split[{idx}]"
    return pos


def validate(s: Scenagram) -> list[Violation]:
    """Structural checks; returns violations ordered by document position."""
    out: list[Violation] = []

    if s.version != FORMAT_VERSION:
        out.append(
            Violation(
                "BAD_VERSION",
                "version",
                f"version must be {FORMAT_VERSION}, got {s.version}",
            )
        )

    by_id: dict[str, AssetDecl] = {}
    for i, asset in enumerate(s.assets):
        pos = f"assets[{i}]"
        if not asset.id:
            out.append(Violation("BAD_ASSET_ID", pos, "asset id must be non-empty"))
        elif asset.id in by_id:
            out.append(
                Violation("DUPLICATE_ASSET", pos, f"duplicate asset id {asset.id!r}")
            )
        else:
            by_id[asset.id] = asset
        if asset.kind not in (SOUND, IMAGE):
            out.append(
                Violation("BAD_ASSET_KIND", pos, f"unknown asset kind {asset.kind!r}")
            )
        if asset.kind == SOUND:
            if asset.declared_duration_ms is None:
                out.append(
                    Violation(
                        "ASSET_DURATION", pos, "sound asset needs declared_duration_ms"
                    )
                )
            elif asset.declared_duration_ms < 0:
                out.append(
                    Violation(
                        "ASSET_DURATION",
                        pos,
                        "declared_duration_ms must be nonnegative",
                    )
                )
        elif asset.declared_duration_ms is not None:
            out.append(
                Violation(
                    "ASSET_DURATION",
                    pos,
                    f"{asset.kind} asset must not declare a duration",
                )
            )

    def check_ref(pos: str, asset_id: str, want_kind: str) -> None:
        asset = by_id.get(asset_id)
        if asset is None:
            out.append(Violation("UNKNOWN_ASSET", pos, f"unknown asset {asset_id!r}"))
        elif asset.kind != want_kind:
            out.append(
                Violation(
                    "WRONG_ASSET_KIND",
                    pos,
                    f"asset {asset_id!r} is {asset.kind}, block needs {want_kind}",
                )
            )

    def check_seq(path: TimelinePath, seq: Sequence) -> None:
        base = _seq_pos(path)
        for i, block in enumerate(seq.items):
            pos = f"{base}.items[{i}]"
            if isinstance(block, (ShowText, ShowImage)):
                if block.duration_ms < 1:
                    out.append(
                        Violation(
                            "BAD_DURATION", pos, "duration_ms must be at least 1"
                        )
                    )
            if isinstance(block, ShowImage):
                check_ref(pos, block.asset_id, IMAGE)
            elif isinstance(block, PlaySound):
                check_ref(pos, block.asset_id, SOUND)
            elif isinstance(block, WaitKey):
                key = block.key.key
                if key is not None and (key == "" or any(c.isspace() for c in key)):
                    out.append(
                        Violation(
                            "BAD_KEY",
                            pos,
                            "literal key must be a non-empty token without whitespace",
                        )
                    )
        term = seq.terminal
        if isinstance(term, Split):
            if len(term.branches) < 2:
                out.append(
                    Violation(
                        "SPLIT_ARITY",
                        f"{base}.terminal",
                        f"split needs at least 2 branches, got {len(term.branches)}",
                    )
                )
            for i, branch in enumerate(term.branches):
                check_seq(path + (i,), branch)

    check_seq((), s.root)
    return out


# Generator vocabulary; durations and key names are deliberately small sets so
# that random input scripts have a real chance of matching a waiting block.
_GEN_DURATIONS = (500, 1000, 2000, 3000)
_GEN_KEYS = ("a", "b", "Enter")
_GEN_WORDS = (
    "Bonjour",
    "Attends",
    "Regarde",
    "Ecoute",
    "Encore",
    "Voila",
    "Fin",
    "Suite",
)


def generate_random(seed: int, max_blocks: int, max_depth: int) -> Scenagram:
    """Seeded random scenagram; same arguments always yield the same tree.

    The result always passes validate().  max_blocks bounds the total block
    count (0 gives the empty scenagram), max_depth bounds split nesting.
    """
    if max_blocks <= 0:
        return Scenagram(root=Sequence(), title=f"generated-{seed}")

    rng = Random(seed)
    assets = (
        AssetDecl("snd0", SOUND, "assets/snd0.wav", rng.choice(_GEN_DURATIONS)),
        AssetDecl("snd1", SOUND, "assets/snd1.wav", rng.choice(_GEN_DURATIONS)),
        AssetDecl("img0", IMAGE, "assets/img0.png"),
        AssetDecl("img1", IMAGE, "assets/img1.png"),
    )
    budget = [rng.randint(1, max_blocks)]

    def make_block() -> Block:
        roll = rng.random()
        if roll < 0.30:
            return ShowText(rng.choice(_GEN_WORDS), rng.choice(_GEN_DURATIONS))
        if roll < 0.50:
            return ShowImage(rng.choice(("img0", "img1")), rng.choice(_GEN_DURATIONS))
        if roll < 0.70:
            return PlaySound(rng.choice(("snd0", "snd1")))
        if rng.random() < 0.12:
            return WaitKey(ANY_KEY)
        return WaitKey(KeySpec(rng.choice(_GEN_KEYS)))

    def build(depth: int) -> Sequence:
        take = rng.randint(0, min(4, budget[0]))
        budget[0] -= take
        items = tuple(make_block() for _ in range(take))
        may_split = depth < max_depth and budget[0] >= 2 and rng.random() < 0.45
        if not may_split:
            return Sequence(items)
        branches = tuple(build(depth + 1) for _ in range(rng.randint(2, 3)))
        return Sequence(items, Split(branches))

    return Scenagram(
        root=build(0),
        assets=assets,
        title=f"generated-{seed}",
    )
