/**
 * Thin transport wrappers: document endpoints over fetch, playback session
 * over a websocket. Both take their transport as a parameter so tests can
 * drive them with fakes; main.ts passes the browser's fetch and WebSocket.
 */

import type { DocumentData } from "./model";
import {
  encodeClientMessage,
  parseServerMessage,
  type ServerMessage,
  type ViolationData,
} from "./protocol";

export type FetchLike = (
  url: string,
  init?: { method?: string; body?: string; headers?: Record<string, string> }
) => Promise<{
  ok: boolean;
  status: number;
  text(): Promise<string>;
  json(): Promise<unknown>;
}>;

export class RequestFailed extends Error {
  constructor(
    public code: string,
    message: string,
    public report: ViolationData[] = []
  ) {
    super(message);
  }
}

async function failureOf(res: {
  status: number;
  json(): Promise<unknown>;
}): Promise<RequestFailed> {
  try {
    const body = (await res.json()) as {
      code?: string;
      message?: string;
      report?: ViolationData[];
    };
    return new RequestFailed(
      body.code ?? `HTTP_${res.status}`,
      body.message ?? `request failed with ${res.status}`,
      body.report ?? []
    );
  } catch {
    return new RequestFailed(`HTTP_${res.status}`, `request failed with ${res.status}`);
  }
}

export class DocumentsClient {
  constructor(private baseUrl: string, private fetchFn: FetchLike) {}

  async list(): Promise<string[]> {
    const res = await this.fetchFn(`${this.baseUrl}/documents`);
    if (!res.ok) throw await failureOf(res);
    const body = (await res.json()) as { documents?: string[] };
    return body.documents ?? [];
  }

  /** Returns the stored canonical text of one document. */
  async get(name: string): Promise<string> {
    const res = await this.fetchFn(
      `${this.baseUrl}/documents/${encodeURIComponent(name)}`
    );
    if (!res.ok) throw await failureOf(res);
    return res.text();
  }

  async put(name: string, doc: DocumentData): Promise<void> {
    const res = await this.fetchFn(
      `${this.baseUrl}/documents/${encodeURIComponent(name)}`,
      {
        method: "PUT",
        body: JSON.stringify(doc),
        headers: { "content-type": "application/json" },
      }
    );
    if (!res.ok) throw await failureOf(res);
  }
}

/** The subset of WebSocket the session needs; the DOM type satisfies it. */
export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
}

export interface SessionHandlers {
  onMessage(msg: ServerMessage): void;
  onClosed(): void;
  /** Called for frames that fail to parse; the session then closes. */
  onFault?(reason: string): void;
}

export class SessionClient {
  private socket: SocketLike;
  private closed = false;

  constructor(socket: SocketLike, private handlers: SessionHandlers) {
    this.socket = socket;
    socket.onmessage = (ev) => {
      let msg: ServerMessage;
      try {
        msg = parseServerMessage(String(ev.data));
      } catch (err) {
        this.handlers.onFault?.(err instanceof Error ? err.message : String(err));
        this.close();
        return;
      }
      this.handlers.onMessage(msg);
    };
    socket.onclose = () => {
      if (!this.closed) {
        this.closed = true;
        this.handlers.onClosed();
      }
    };
  }

  load(document: DocumentData): void {
    this.socket.send(encodeClientMessage({ type: "load", document }));
  }

  start(): void {
    this.socket.send(encodeClientMessage({ type: "start" }));
  }

  sendKey(key: string): void {
    this.socket.send(encodeClientMessage({ type: "key", key }));
  }

  stop(): void {
    this.socket.send(encodeClientMessage({ type: "stop" }));
  }

  save(name?: string): void {
    this.socket.send(
      encodeClientMessage(name === undefined ? { type: "save" } : { type: "save", name })
    );
  }

  close(): void {
    if (!this.closed) {
      this.closed = true;
      this.socket.close();
      this.handlers.onClosed();
    }
  }
}
