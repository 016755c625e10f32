/**
 * Browser bootstrap: same-origin service, real fetch and WebSocket.
 * Serve the frontend directory through the playback service
 * (scenaprod serve --ui frontend) so /documents and /session resolve.
 */

import { DocumentsClient, type FetchLike, type SocketLike } from "./client";
import { EditorApp } from "./editor";

function wsUrl(): string {
  const proto = window.location.protocol === "https:" ? "wss:" : "ws:";
  return `${proto}//${window.location.host}/session`;
}

const root = document.getElementById("app");
if (!root) throw new Error("missing #app element");

new EditorApp(root, {
  docs: new DocumentsClient("", fetch.bind(window) as FetchLike),
  openSocket: (): SocketLike => new WebSocket(wsUrl()) as unknown as SocketLike,
});
