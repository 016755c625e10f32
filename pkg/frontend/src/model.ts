/**
 * Document shapes (the .scg.json data as plain objects) and the pure
 * authoring operations the editor applies to them.
 *
 * Every operation returns a fresh document; callers re-render from the
 * result. Validation stays on the server: after an edit the document is
 * PUT or loaded and the returned report is surfaced, so this module never
 * re-implements the semantic checks.
 */

export type TimelinePath = number[];

export interface AssetData {
  id: string;
  kind: "sound" | "image";
  uri: string;
  duration_ms?: number;
}

export type BlockKind = "show_text" | "show_image" | "play_sound" | "wait_key";

export type BlockData =
  | { kind: "show_text"; text: string; duration_ms: number }
  | { kind: "show_image"; asset: string; duration_ms: number }
  | { kind: "play_sound"; asset: string }
  | { kind: "wait_key"; key: string | null };

export interface SequenceData {
  items: BlockData[];
  terminal: "end" | { split: SequenceData[] };
}

export interface LayoutHintsData {
  columns_per_row: number;
}

export interface DocumentData {
  version: 1;
  title?: string;
  assets: AssetData[];
  root: SequenceData;
  layout_hints?: LayoutHintsData;
}

export function newDocument(title: string): DocumentData {
  return {
    version: 1,
    title,
    assets: [],
    root: { items: [], terminal: "end" },
  };
}

/** Every sequence with its branch path, depth first, parents before kids. */
export function listSequences(
  doc: DocumentData
): { path: TimelinePath; seq: SequenceData }[] {
  const out: { path: TimelinePath; seq: SequenceData }[] = [];
  const visit = (seq: SequenceData, path: TimelinePath): void => {
    out.push({ path, seq });
    if (seq.terminal !== "end") {
      seq.terminal.split.forEach((branch, i) => visit(branch, [...path, i]));
    }
  };
  visit(doc.root, []);
  return out;
}

export function sequenceAt(doc: DocumentData, path: TimelinePath): SequenceData {
  let seq = doc.root;
  for (const i of path) {
    if (seq.terminal === "end" || i < 0 || i >= seq.terminal.split.length) {
      throw new RangeError(`no sequence at path [${path.join(",")}]`);
    }
    const branch = seq.terminal.split[i];
    if (branch === undefined) throw new RangeError("branch missing");
    seq = branch;
  }
  return seq;
}

function withSequence(
  doc: DocumentData,
  path: TimelinePath,
  edit: (seq: SequenceData) => void
): DocumentData {
  const next = structuredClone(doc);
  edit(sequenceAt(next, path));
  return next;
}

export function appendBlock(
  doc: DocumentData,
  path: TimelinePath,
  block: BlockData
): DocumentData {
  return withSequence(doc, path, (seq) => seq.items.push(block));
}

export function updateBlock(
  doc: DocumentData,
  path: TimelinePath,
  index: number,
  block: BlockData
): DocumentData {
  return withSequence(doc, path, (seq) => {
    if (index < 0 || index >= seq.items.length) {
      throw new RangeError(`no block ${index} in lane [${path.join(",")}]`);
    }
    seq.items[index] = block;
  });
}

export function removeBlock(
  doc: DocumentData,
  path: TimelinePath,
  index: number
): DocumentData {
  return withSequence(doc, path, (seq) => {
    if (index < 0 || index >= seq.items.length) {
      throw new RangeError(`no block ${index} in lane [${path.join(",")}]`);
    }
    seq.items.splice(index, 1);
  });
}

/**
 * The contextual cross after a lane's last block: fork the line of time.
 * A lane ending in "end" becomes a two-branch fork; a lane that already
 * forks gains one more branch. New branches start empty.
 */
export function duplicateLine(doc: DocumentData, path: TimelinePath): DocumentData {
  return withSequence(doc, path, (seq) => {
    const empty = (): SequenceData => ({ items: [], terminal: "end" });
    if (seq.terminal === "end") {
      seq.terminal = { split: [empty(), empty()] };
    } else {
      seq.terminal.split.push(empty());
    }
  });
}

function freshAssetId(doc: DocumentData, stem: string): string {
  const taken = new Set(doc.assets.map((a) => a.id));
  for (let n = 1; ; n++) {
    const id = `${stem}-${n}`;
    if (!taken.has(id)) return id;
  }
}

/**
 * Palette placement: append a block of the given kind with usable defaults.
 * Sound and image blocks need an asset; the first declared one of the right
 * kind is reused, otherwise a placeholder asset is added to the document.
 */
export function placeBlock(
  doc: DocumentData,
  path: TimelinePath,
  kind: BlockKind
): DocumentData {
  if (kind === "show_text") {
    return appendBlock(doc, path, {
      kind,
      text: "Texte",
      duration_ms: 1000,
    });
  }
  if (kind === "wait_key") {
    return appendBlock(doc, path, { kind, key: null });
  }
  const assetKind = kind === "play_sound" ? "sound" : "image";
  let next = structuredClone(doc);
  let asset = next.assets.find((a) => a.kind === assetKind);
  if (!asset) {
    asset = {
      id: freshAssetId(next, assetKind === "sound" ? "son" : "image"),
      kind: assetKind,
      uri: `assets/${assetKind}.bin`,
    };
    if (assetKind === "sound") asset.duration_ms = 1000;
    next.assets.push(asset);
  }
  const block: BlockData =
    kind === "play_sound"
      ? { kind, asset: asset.id }
      : { kind, asset: asset.id, duration_ms: 1000 };
  return appendBlock(next, path, block);
}

/**
 * Maps a validation-report position ("root.items[2]",
 * "root.terminal.split[0].items[1]") to the lane and cell it points at,
 * so the editor can mark the offending block. Asset positions and
 * positions without an items[...] tail return null.
 */
export function positionToCell(
  position: string
): { path: TimelinePath; block: number } | null {
  if (!position.startsWith("root")) return null;
  const path: TimelinePath = [];
  const splitRe = /\.terminal\.split\[(\d+)\]/g;
  let m: RegExpExecArray | null;
  while ((m = splitRe.exec(position)) !== null) {
    path.push(Number(m[1]));
  }
  const items = /\.items\[(\d+)\]/.exec(position);
  if (!items) return null;
  return { path, block: Number(items[1]) };
}
