/**
 * Playback mirror: the client-side readout of a running session.
 *
 * The mirror is computed only from server frames; the client never moves
 * the clock or predicts a block's end by itself. Highlights are exactly
 * the blocks with a received block_started and no block_finished yet, so
 * two lanes light up together only when the server says so.
 */

import type { TimelinePath } from "./model";
import {
  BLOCK_FINISHED,
  BLOCK_STARTED,
  type ServerMessage,
  type SessionStatus,
  type TraceEventData,
  type ViolationData,
} from "./protocol";

export type MirrorStatus = SessionStatus | "disconnected";

export interface ActiveBlock {
  path: TimelinePath;
  block: number;
  detail: Record<string, string | null>;
}

export interface PlaybackMirror {
  status: MirrorStatus;
  clockMs: number;
  /** started-but-not-finished blocks, keyed by lane+cell, insertion order */
  running: Map<string, ActiveBlock>;
  report: ViolationData[];
  error: { code: string; message: string } | null;
  savedDocument: string | null;
}

export function emptyMirror(): PlaybackMirror {
  return {
    status: "idle",
    clockMs: 0,
    running: new Map(),
    report: [],
    error: null,
    savedDocument: null,
  };
}

export function highlightKey(path: TimelinePath, block: number): string {
  return `${path.join(".")}#${block}`;
}

export function isHighlighted(
  mirror: PlaybackMirror,
  path: TimelinePath,
  block: number
): boolean {
  return mirror.running.has(highlightKey(path, block));
}

function withRunning(
  mirror: PlaybackMirror,
  mutate: (running: Map<string, ActiveBlock>) => void
): PlaybackMirror {
  const running = new Map(mirror.running);
  mutate(running);
  return { ...mirror, running };
}

export function applyEvent(
  mirror: PlaybackMirror,
  ev: TraceEventData
): PlaybackMirror {
  if (ev.kind === BLOCK_STARTED && ev.block !== undefined) {
    return withRunning(mirror, (r) =>
      r.set(highlightKey(ev.path, ev.block as number), {
        path: ev.path,
        block: ev.block as number,
        detail: ev.detail ?? {},
      })
    );
  }
  if (ev.kind === BLOCK_FINISHED && ev.block !== undefined) {
    return withRunning(mirror, (r) =>
      r.delete(highlightKey(ev.path, ev.block as number))
    );
  }
  // spawned / consumed / completed / stopped move no highlight; status and
  // clock arrive in the state frame that follows.
  return mirror;
}

export function applyServerMessage(
  mirror: PlaybackMirror,
  msg: ServerMessage
): PlaybackMirror {
  switch (msg.type) {
    case "loaded":
      return {
        ...emptyMirror(),
        status: "loaded",
        report: msg.report,
        savedDocument: mirror.savedDocument,
      };
    case "event":
      return applyEvent(mirror, msg.event);
    case "state":
      return { ...mirror, status: msg.status, clockMs: msg.clock_ms };
    case "saved":
      return { ...mirror, savedDocument: msg.document };
    case "error":
      return {
        ...mirror,
        error: { code: msg.code, message: msg.message },
        report: msg.report.length > 0 ? msg.report : mirror.report,
      };
  }
}

/** Connection loss ends playback visibly; nothing keeps running. */
export function connectionClosed(mirror: PlaybackMirror): PlaybackMirror {
  return { ...mirror, status: "disconnected", running: new Map() };
}

/** Texts and images currently on show, for the playback window. */
export function windowItems(
  mirror: PlaybackMirror
): { kind: string; label: string }[] {
  const items: { kind: string; label: string }[] = [];
  for (const active of mirror.running.values()) {
    const blockKind = active.detail.block;
    if (blockKind === "show_text") {
      items.push({ kind: "text", label: active.detail.text ?? "" });
    } else if (blockKind === "show_image") {
      items.push({ kind: "image", label: active.detail.asset ?? "" });
    } else if (blockKind === "play_sound") {
      items.push({ kind: "sound", label: active.detail.asset ?? "" });
    }
  }
  return items;
}

/**
 * Keyboard-to-session mapping: named keys for Enter, Space and Escape,
 * single characters as themselves, anything else ignored.
 */
export function mapPressedKey(domKey: string): string | null {
  if (domKey === "Enter" || domKey === "Escape") return domKey;
  if (domKey === " " || domKey === "Spacebar") return "Space";
  if (domKey.length === 1) return domKey;
  return null;
}
