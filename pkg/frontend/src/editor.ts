/**
 * The editor's DOM: menu bar, component palette, wrapped dotted grid with
 * fork connectors, parameter pane, validation report and the playback
 * window. All persistent state lives in plain fields and every change
 * re-renders the affected region; documents are small enough that nothing
 * smarter is needed.
 *
 * Keyboard focus rule: while playing, every keypress goes to the session
 * (so key waits can be exercised); while editing, keys go to the inputs.
 */

import { DocumentsClient, RequestFailed, SessionClient, type SocketLike } from "./client";
import { computeLayout, DEFAULT_COLUMNS_PER_ROW } from "./layout";
import {
  duplicateLine,
  newDocument,
  placeBlock,
  positionToCell,
  removeBlock,
  sequenceAt,
  updateBlock,
  type BlockData,
  type BlockKind,
  type DocumentData,
  type TimelinePath,
} from "./model";
import type { ServerMessage, ViolationData } from "./protocol";
import {
  applyServerMessage,
  connectionClosed,
  emptyMirror,
  isHighlighted,
  mapPressedKey,
  windowItems,
  type PlaybackMirror,
} from "./state";

interface Selection {
  path: TimelinePath;
  block: number;
}

const PALETTE: { kind: BlockKind; label: string }[] = [
  { kind: "show_text", label: "Texte" },
  { kind: "show_image", label: "Image" },
  { kind: "play_sound", label: "Son" },
  { kind: "wait_key", label: "Attente touche" },
];

const DRAG_MIME = "text/x-scenaprod-kind";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function blockGlyph(block: BlockData): string {
  switch (block.kind) {
    case "show_text":
      return `T ${block.text.slice(0, 10)}`;
    case "show_image":
      return `I ${block.asset}`;
    case "play_sound":
      return `S ${block.asset}`;
    case "wait_key":
      return `K ${block.key ?? "*"}`;
  }
}

export interface EditorDeps {
  docs: DocumentsClient;
  openSocket: () => SocketLike;
}

export class EditorApp {
  doc: DocumentData = newDocument("sans-titre");
  docName = "sans-titre";
  columns = DEFAULT_COLUMNS_PER_ROW;
  selection: Selection | null = null;
  mirror: PlaybackMirror = emptyMirror();
  playing = false;

  private session: SessionClient | null = null;
  private gridEl!: HTMLElement;
  private paramsEl!: HTMLElement;
  private playwinEl!: HTMLElement;
  private reportEl!: HTMLElement;
  private statusEl!: HTMLElement;
  private listEl!: HTMLSelectElement;
  private menu: HTMLElement | null = null;

  constructor(private root: HTMLElement, private deps: EditorDeps) {
    this.buildChrome();
    document.addEventListener("keydown", (e) => this.onKeyDown(e), true);
    document.addEventListener("click", () => this.dismissMenu());
    this.renderAll();
    void this.refreshList();
  }

  // ---- chrome -----------------------------------------------------------

  private buildChrome(): void {
    const bar = el("div", "menubar");
    const newBtn = el("button", "", "Nouveau");
    newBtn.onclick = () => {
      this.doc = newDocument("sans-titre");
      this.docName = "sans-titre";
      this.selection = null;
      this.mirror = emptyMirror();
      this.renderAll();
    };
    const nameInput = el("input") as HTMLInputElement;
    nameInput.value = this.docName;
    nameInput.onchange = () => (this.docName = nameInput.value.trim());
    nameInput.id = "doc-name";
    const saveBtn = el("button", "", "Enregistrer");
    saveBtn.onclick = () => void this.save();
    this.listEl = el("select") as HTMLSelectElement;
    const openBtn = el("button", "", "Ouvrir");
    openBtn.onclick = () => void this.open(this.listEl.value);
    const playBtn = el("button", "play", "Jouer");
    playBtn.onclick = () => this.play();
    const stopBtn = el("button", "", "Stop");
    stopBtn.onclick = () => this.stopPlayback();
    const colsInput = el("input") as HTMLInputElement;
    colsInput.type = "number";
    colsInput.min = "1";
    colsInput.max = "16";
    colsInput.value = String(this.columns);
    colsInput.title = "colonnes par ligne";
    colsInput.onchange = () => {
      const n = Number(colsInput.value);
      if (Number.isInteger(n) && n >= 1) {
        this.columns = n;
        this.doc = { ...this.doc, layout_hints: { columns_per_row: n } };
        this.renderGrid();
      }
    };
    this.statusEl = el("span", "status", "idle");
    bar.append(
      newBtn,
      nameInput,
      saveBtn,
      this.listEl,
      openBtn,
      playBtn,
      stopBtn,
      colsInput,
      this.statusEl
    );

    const palette = el("div", "palette");
    for (const item of PALETTE) {
      const chip = el("span", "chip", item.label);
      chip.draggable = true;
      chip.dataset.kind = item.kind;
      chip.addEventListener("dragstart", (e) => {
        e.dataTransfer?.setData(DRAG_MIME, item.kind);
      });
      chip.onclick = () => {
        const path = this.selection ? this.selection.path : [];
        this.edit(placeBlock(this.doc, path, item.kind));
      };
      palette.append(chip);
    }

    this.gridEl = el("div", "grid");
    this.paramsEl = el("div", "params");
    this.playwinEl = el("div", "playwin");
    this.reportEl = el("div", "report");

    const main = el("div", "main");
    const side = el("div", "side");
    side.append(palette, this.paramsEl, this.playwinEl);
    main.append(this.gridEl, side);
    this.root.append(bar, main, this.reportEl);
  }

  // ---- rendering --------------------------------------------------------

  renderAll(): void {
    this.renderGrid();
    this.renderParams();
    this.renderPlaywin();
    this.renderReport();
  }

  private invalidCells(): Set<string> {
    const marks = new Set<string>();
    for (const v of this.mirror.report) {
      const cell = positionToCell(v.path);
      if (cell) marks.add(`${cell.path.join(".")}#${cell.block}`);
    }
    return marks;
  }

  renderGrid(): void {
    const grid = computeLayout(this.doc, this.columns);
    const invalid = this.invalidCells();
    const forkAnchors = new Map(
      grid.connectors.map((c) => {
        const parent = c.child_paths[0]?.slice(0, -1) ?? [];
        return [parent.join("."), c] as const;
      })
    );
    this.gridEl.replaceChildren();
    for (const lane of grid.lanes) {
      const laneEl = el("div", "lane");
      laneEl.dataset.path = lane.path.join(".");
      laneEl.style.marginLeft = `${lane.path.length * 24}px`;
      const label = el(
        "span",
        "lane-label",
        lane.path.length === 0 ? "ligne" : `ligne ${lane.path.join(".")}`
      );
      const rows = el("div", "rows");
      const byRow = new Map<number, HTMLElement>();
      const seq = sequenceAt(this.doc, lane.path);
      for (const cell of lane.cells) {
        let rowEl = byRow.get(cell.row);
        if (!rowEl) {
          rowEl = el("div", "cells");
          byRow.set(cell.row, rowEl);
          rows.append(rowEl);
        }
        const block = seq.items[cell.block_index];
        const cellEl = el("span", "cell", block ? blockGlyph(block) : "?");
        const key = `${lane.path.join(".")}#${cell.block_index}`;
        if (invalid.has(key)) cellEl.classList.add("invalid");
        if (
          this.selection &&
          this.selection.path.join(".") === lane.path.join(".") &&
          this.selection.block === cell.block_index
        ) {
          cellEl.classList.add("selected");
        }
        if (isHighlighted(this.mirror, lane.path, cell.block_index)) {
          cellEl.classList.add("highlight");
        }
        const mark = this.mirror.report.find(
          (v) => positionToCell(v.path)?.path.join(".") === lane.path.join(".")
            && positionToCell(v.path)?.block === cell.block_index
        );
        if (mark) cellEl.title = `${mark.code}: ${mark.message}`;
        cellEl.onclick = (e) => {
          e.stopPropagation();
          this.selection = { path: [...lane.path], block: cell.block_index };
          this.renderGrid();
          this.renderParams();
        };
        rowEl.append(cellEl);
      }
      if (byRow.size === 0) rows.append(el("div", "cells empty"));

      // the cross after the last block: fork this line of time
      const cross = el("button", "cross", "✕");
      cross.title = "dupliquer la ligne";
      cross.onclick = (e) => {
        e.stopPropagation();
        this.openForkMenu(cross, [...lane.path]);
      };
      const lastRow = rows.lastElementChild as HTMLElement;
      lastRow.append(cross);

      const anchor = forkAnchors.get(lane.path.join("."));
      if (anchor) {
        const note = el(
          "span",
          "connector",
          `branches: ${anchor.child_paths.map((p) => p.join(".")).join("  ")}`
        );
        lastRow.append(note);
      }

      laneEl.addEventListener("dragover", (e) => e.preventDefault());
      laneEl.addEventListener("drop", (e) => {
        e.preventDefault();
        const kind = e.dataTransfer?.getData(DRAG_MIME);
        if (kind) this.edit(placeBlock(this.doc, lane.path, kind as BlockKind));
      });
      laneEl.append(label, rows);
      this.gridEl.append(laneEl);
    }
    this.statusEl.textContent = `${this.mirror.status} ${this.mirror.clockMs}ms`;
  }

  renderParams(): void {
    this.paramsEl.replaceChildren(el("h3", "", "Paramètres"));
    if (!this.selection) {
      this.paramsEl.append(el("p", "hint", "sélectionner un bloc"));
      return;
    }
    const { path, block } = this.selection;
    let items: BlockData[];
    try {
      items = sequenceAt(this.doc, path).items;
    } catch {
      this.selection = null;
      return;
    }
    const current = items[block];
    if (!current) {
      this.selection = null;
      this.paramsEl.append(el("p", "hint", "sélectionner un bloc"));
      return;
    }
    const apply = (patch: Partial<BlockData>): void => {
      this.edit(
        updateBlock(this.doc, path, block, { ...current, ...patch } as BlockData)
      );
    };
    const field = (labelText: string, input: HTMLElement): void => {
      const row = el("label", "field");
      row.append(el("span", "", labelText), input);
      this.paramsEl.append(row);
    };

    if (current.kind === "show_text") {
      const text = el("input") as HTMLInputElement;
      text.value = current.text;
      text.onchange = () => apply({ text: text.value });
      field("Texte", text);
    }
    if (current.kind === "show_image" || current.kind === "play_sound") {
      const wanted = current.kind === "play_sound" ? "sound" : "image";
      const select = el("select") as HTMLSelectElement;
      for (const asset of this.doc.assets.filter((a) => a.kind === wanted)) {
        const opt = el("option", "", asset.id) as HTMLOptionElement;
        opt.value = asset.id;
        select.append(opt);
      }
      select.value = current.asset;
      select.onchange = () => apply({ asset: select.value });
      field("Ressource", select);
    }
    if (current.kind === "show_text" || current.kind === "show_image") {
      const dur = el("input") as HTMLInputElement;
      dur.type = "number";
      dur.min = "1";
      dur.value = String(current.duration_ms);
      dur.onchange = () => apply({ duration_ms: Number(dur.value) });
      field("Durée (ms)", dur);
    }
    if (current.kind === "wait_key") {
      const key = el("input") as HTMLInputElement;
      key.value = current.key ?? "";
      key.placeholder = "toute touche";
      key.onchange = () => apply({ key: key.value === "" ? null : key.value });
      field("Touche", key);
    }
    const del = el("button", "danger", "Supprimer le bloc");
    del.onclick = () => {
      this.selection = null;
      this.edit(removeBlock(this.doc, path, block));
    };
    this.paramsEl.append(del);
  }

  renderPlaywin(): void {
    this.playwinEl.replaceChildren(el("h3", "", "Lecture"));
    const items = windowItems(this.mirror);
    if (items.length === 0) {
      this.playwinEl.append(el("p", "hint", "rien en cours"));
    }
    for (const item of items) {
      this.playwinEl.append(el("div", `shown ${item.kind}`, item.label));
    }
    if (this.mirror.status === "disconnected") {
      this.playwinEl.append(el("p", "lost", "connexion perdue"));
    }
  }

  renderReport(): void {
    this.reportEl.replaceChildren();
    if (this.mirror.error) {
      this.reportEl.append(
        el("div", "error", `${this.mirror.error.code}: ${this.mirror.error.message}`)
      );
    }
    for (const v of this.mirror.report) {
      this.reportEl.append(el("div", "violation", `${v.code} ${v.path}: ${v.message}`));
    }
  }

  // ---- fork menu --------------------------------------------------------

  private openForkMenu(anchor: HTMLElement, path: TimelinePath): void {
    this.dismissMenu();
    const menu = el("div", "context-menu");
    const action = el("button", "", "Dupliquer la ligne");
    action.onclick = (e) => {
      e.stopPropagation();
      this.dismissMenu();
      this.edit(duplicateLine(this.doc, path));
    };
    menu.append(action);
    const rect = anchor.getBoundingClientRect();
    menu.style.left = `${rect.left + window.scrollX}px`;
    menu.style.top = `${rect.bottom + window.scrollY}px`;
    document.body.append(menu);
    this.menu = menu;
  }

  private dismissMenu(): void {
    this.menu?.remove();
    this.menu = null;
  }

  // ---- document flow ----------------------------------------------------

  private edit(next: DocumentData): void {
    this.doc = next;
    this.mirror = { ...this.mirror, report: [], error: null };
    this.renderAll();
  }

  async refreshList(): Promise<void> {
    try {
      const names = await this.deps.docs.list();
      this.listEl.replaceChildren();
      for (const name of names) {
        const opt = el("option", "", name) as HTMLOptionElement;
        opt.value = name;
        this.listEl.append(opt);
      }
    } catch {
      // list stays stale when the service is unreachable
    }
  }

  async save(): Promise<void> {
    try {
      await this.deps.docs.put(this.docName, this.doc);
      this.mirror = { ...this.mirror, report: [], error: null };
      await this.refreshList();
    } catch (err) {
      if (err instanceof RequestFailed) {
        this.mirror = {
          ...this.mirror,
          report: err.report,
          error: { code: err.code, message: err.message },
        };
      } else {
        this.mirror = {
          ...this.mirror,
          error: { code: "NETWORK", message: String(err) },
        };
      }
    }
    this.renderAll();
  }

  async open(name: string): Promise<void> {
    if (!name) return;
    try {
      const text = await this.deps.docs.get(name);
      this.doc = JSON.parse(text) as DocumentData;
      this.docName = name;
      this.columns = this.doc.layout_hints?.columns_per_row ?? DEFAULT_COLUMNS_PER_ROW;
      this.selection = null;
      this.mirror = emptyMirror();
      const nameInput = this.root.querySelector<HTMLInputElement>("#doc-name");
      if (nameInput) nameInput.value = name;
    } catch (err) {
      this.mirror = {
        ...this.mirror,
        error: {
          code: err instanceof RequestFailed ? err.code : "NETWORK",
          message: err instanceof Error ? err.message : String(err),
        },
      };
    }
    this.renderAll();
  }

  // ---- playback ---------------------------------------------------------

  play(): void {
    if (this.playing) return;
    const socket = this.deps.openSocket();
    const session = new SessionClient(socket, {
      onMessage: (msg) => this.onSessionMessage(msg),
      onClosed: () => {
        if (this.playing) {
          this.mirror = connectionClosed(this.mirror);
          this.playing = false;
          this.session = null;
          this.renderAll();
        }
      },
      onFault: (reason) => {
        this.mirror = {
          ...this.mirror,
          error: { code: "PROTOCOL", message: reason },
        };
      },
    });
    this.session = session;
    this.playing = true;
    socket.onopen = () => session.load(this.doc);
    // test sockets may already be open; loading twice is harmless only if
    // nothing was sent yet, so guard with the onopen contract instead
    this.renderAll();
  }

  private onSessionMessage(msg: ServerMessage): void {
    this.mirror = applyServerMessage(this.mirror, msg);
    if (msg.type === "loaded") {
      if (msg.report.length === 0) {
        this.session?.start();
      } else {
        this.playing = false;
        this.session?.close();
        this.session = null;
      }
    }
    if (
      msg.type === "state" &&
      (msg.status === "completed" || msg.status === "stopped")
    ) {
      this.playing = false;
      this.session?.close();
      this.session = null;
    }
    if (msg.type === "error") {
      this.playing = false;
      this.session?.close();
      this.session = null;
    }
    this.renderAll();
  }

  stopPlayback(): void {
    this.session?.stop();
  }

  private onKeyDown(e: KeyboardEvent): void {
    if (!this.playing || !this.session) return;
    const key = mapPressedKey(e.key);
    if (key !== null) {
      e.preventDefault();
      e.stopPropagation();
      this.session.sendKey(key);
    }
  }
}

export function violationSummary(report: ViolationData[]): string {
  return report.map((v) => `${v.code} ${v.path}`).join("; ");
}
