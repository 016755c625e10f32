/**
 * Grid geometry, mirrored one-for-one from the server package's layout
 * module: one lane per sequence in depth-first order, cells wrapping at
 * columns_per_row, one connector per fork anchored at the parent's last
 * cell. The mirror is pinned by tests/fixtures/layout_cases.json, which
 * the server generates; if the rule ever drifts, those tests fail.
 *
 * Field names stay snake_case to match the generated fixtures byte for
 * byte.
 */

import type { DocumentData, TimelinePath } from "./model";
import { listSequences } from "./model";

export interface CellData {
  row: number;
  col: number;
  block_index: number;
}

export interface LaneData {
  path: TimelinePath;
  cells: CellData[];
}

export interface ConnectorData {
  spawn_row: number;
  spawn_col: number;
  child_paths: TimelinePath[];
}

export interface GridData {
  columns_per_row: number;
  lanes: LaneData[];
  connectors: ConnectorData[];
}

export const DEFAULT_COLUMNS_PER_ROW = 8;

export function computeLayout(
  doc: DocumentData,
  columnsPerRow: number = DEFAULT_COLUMNS_PER_ROW
): GridData {
  if (columnsPerRow < 1) {
    throw new RangeError("columns_per_row must be at least 1");
  }
  const lanes: LaneData[] = [];
  const connectors: ConnectorData[] = [];
  for (const { path, seq } of listSequences(doc)) {
    const cells: CellData[] = seq.items.map((_, i) => ({
      row: Math.floor(i / columnsPerRow),
      col: i % columnsPerRow,
      block_index: i,
    }));
    lanes.push({ path, cells });
    if (seq.terminal !== "end") {
      let spawnRow = 0;
      let spawnCol = 0;
      if (seq.items.length > 0) {
        const last = seq.items.length - 1;
        spawnRow = Math.floor(last / columnsPerRow);
        spawnCol = last % columnsPerRow;
      }
      connectors.push({
        spawn_row: spawnRow,
        spawn_col: spawnCol,
        child_paths: seq.terminal.split.map((_, i) => [...path, i]),
      });
    }
  }
  return { columns_per_row: columnsPerRow, lanes, connectors };
}
