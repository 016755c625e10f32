/**
 * Wire schemas for the playback service: the JSON frames of the /session
 * websocket and the error body of the document endpoints. Parsing is
 * defensive; a frame that does not match the contract throws, it is never
 * half-read.
 */

import type { DocumentData, TimelinePath } from "./model";

export const BLOCK_STARTED = "block_started";
export const BLOCK_FINISHED = "block_finished";
export const KEY_CONSUMED = "key_consumed";
export const TIMELINE_SPAWNED = "timeline_spawned";
export const SCENAGRAM_COMPLETED = "scenagram_completed";
export const SCENAGRAM_STOPPED = "scenagram_stopped";

export interface TraceEventData {
  t: number;
  kind: string;
  path: TimelinePath;
  block?: number;
  detail?: Record<string, string | null>;
}

export type SessionStatus =
  | "idle"
  | "loaded"
  | "running"
  | "completed"
  | "stopped";

export interface ViolationData {
  code: string;
  path: string;
  message: string;
}

export interface LoadedMsg {
  type: "loaded";
  report: ViolationData[];
}

export interface EventMsg {
  type: "event";
  event: TraceEventData;
}

export interface StateMsg {
  type: "state";
  status: SessionStatus;
  clock_ms: number;
}

export interface SavedMsg {
  type: "saved";
  document: string;
}

export interface ErrorMsg {
  type: "error";
  code: string;
  message: string;
  report: ViolationData[];
}

export type ServerMessage = LoadedMsg | EventMsg | StateMsg | SavedMsg | ErrorMsg;

export class ProtocolFault extends Error {}

function isRecord(v: unknown): v is Record<string, unknown> {
  return typeof v === "object" && v !== null && !Array.isArray(v);
}

function isPath(v: unknown): v is TimelinePath {
  return Array.isArray(v) && v.every((x) => Number.isInteger(x) && x >= 0);
}

function asViolations(v: unknown): ViolationData[] {
  if (!Array.isArray(v)) throw new ProtocolFault("report must be an array");
  return v.map((entry) => {
    if (
      !isRecord(entry) ||
      typeof entry.code !== "string" ||
      typeof entry.path !== "string" ||
      typeof entry.message !== "string"
    ) {
      throw new ProtocolFault("malformed violation entry");
    }
    return { code: entry.code, path: entry.path, message: entry.message };
  });
}

function asEvent(v: unknown): TraceEventData {
  if (
    !isRecord(v) ||
    typeof v.t !== "number" ||
    typeof v.kind !== "string" ||
    !isPath(v.path)
  ) {
    throw new ProtocolFault("malformed trace event");
  }
  const ev: TraceEventData = { t: v.t, kind: v.kind, path: v.path };
  if (v.block !== undefined) {
    if (typeof v.block !== "number") throw new ProtocolFault("bad block index");
    ev.block = v.block;
  }
  if (v.detail !== undefined) {
    if (!isRecord(v.detail)) throw new ProtocolFault("bad event detail");
    const detail: Record<string, string | null> = {};
    for (const [k, val] of Object.entries(v.detail)) {
      if (val !== null && typeof val !== "string") {
        throw new ProtocolFault("bad event detail value");
      }
      detail[k] = val;
    }
    ev.detail = detail;
  }
  return ev;
}

const STATUSES: SessionStatus[] = [
  "idle",
  "loaded",
  "running",
  "completed",
  "stopped",
];

export function parseServerMessage(text: string): ServerMessage {
  let data: unknown;
  try {
    data = JSON.parse(text);
  } catch {
    throw new ProtocolFault("frame is not JSON");
  }
  if (!isRecord(data)) throw new ProtocolFault("frame is not an object");
  switch (data.type) {
    case "loaded":
      return { type: "loaded", report: asViolations(data.report) };
    case "event":
      return { type: "event", event: asEvent(data.event) };
    case "state": {
      const status = data.status;
      if (
        typeof status !== "string" ||
        !STATUSES.includes(status as SessionStatus) ||
        typeof data.clock_ms !== "number"
      ) {
        throw new ProtocolFault("malformed state frame");
      }
      return {
        type: "state",
        status: status as SessionStatus,
        clock_ms: data.clock_ms,
      };
    }
    case "saved":
      if (typeof data.document !== "string") {
        throw new ProtocolFault("malformed saved frame");
      }
      return { type: "saved", document: data.document };
    case "error": {
      if (typeof data.code !== "string" || typeof data.message !== "string") {
        throw new ProtocolFault("malformed error frame");
      }
      const report = data.report === undefined ? [] : asViolations(data.report);
      return { type: "error", code: data.code, message: data.message, report };
    }
    default:
      throw new ProtocolFault(`unknown frame type ${String(data.type)}`);
  }
}

export type ClientMessage =
  | { type: "load"; document: DocumentData }
  | { type: "start" }
  | { type: "key"; key: string }
  | { type: "stop" }
  | { type: "save"; name?: string };

export function encodeClientMessage(msg: ClientMessage): string {
  return JSON.stringify(msg);
}
