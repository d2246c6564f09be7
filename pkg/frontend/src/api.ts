// REST and WebSocket clients for the session server. Everything the UI
// needs goes through these two classes; no other server surface is used.

import type { Envelope, MessageType } from "./wire.js";
import { parseEnvelope, encodeEnvelope } from "./wire.js";
import type { DatasetManifest, TileAddress } from "./tiles.js";
import { tilePath, manifestPath } from "./tiles.js";
import type { ContourDoc } from "./stroke.js";

export class ServerApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

export interface CommitResult {
  contour_id: string;
  structure_label: string;
  collisions: { contour_id: string; points: [number, number][] }[];
  accuracy: number | null;
  rebuild_due_ms: number;
}

export interface GradeResult {
  record: Record<string, unknown>;
  grade_summary: {
    author_id: string;
    structure_label: string;
    mean_stars: number;
    grade_count: number;
  }[];
}

async function readError(res: Response): Promise<ServerApiError> {
  let code = "http_error";
  let message = `${res.status} ${res.statusText}`;
  try {
    const body = (await res.json()) as { error?: { code?: string; message?: string } };
    if (body.error?.code) code = body.error.code;
    if (body.error?.message) message = body.error.message;
  } catch {
    // non-JSON error body; keep the status line
  }
  return new ServerApiError(res.status, code, message);
}

export class RestClient {
  constructor(
    private baseUrl: string,
    private fetchImpl: typeof fetch = fetch,
  ) {
    this.baseUrl = baseUrl.replace(/\/$/, "");
  }

  private async json<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await this.fetchImpl(this.baseUrl + path, init);
    if (!res.ok) throw await readError(res);
    return (await res.json()) as T;
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return this.json<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  createSession(opts: {
    dataset_id: string;
    grouping?: "automatic" | "manual";
    atlas_id?: string;
    session_id?: string;
  }): Promise<Record<string, unknown>> {
    return this.post("/sessions", opts);
  }

  getSnapshot(sessionId: string): Promise<Record<string, unknown>> {
    return this.json(`/sessions/${sessionId}/snapshot`);
  }

  commitContour(sessionId: string, senderId: string, contour: ContourDoc): Promise<CommitResult> {
    return this.post(`/sessions/${sessionId}/contours`, {
      sender_id: senderId,
      contour,
    });
  }

  async fetchMeshObj(sessionId: string, structureLabel: string): Promise<string> {
    const res = await this.fetchImpl(
      `${this.baseUrl}/sessions/${sessionId}/structures/${structureLabel}/mesh.obj`,
    );
    if (!res.ok) throw await readError(res);
    return res.text();
  }

  submitGrade(
    sessionId: string,
    grade: { grader_id: string; author_id: string; structure_label: string; stars: number },
  ): Promise<GradeResult> {
    return this.post(`/sessions/${sessionId}/grades`, grade);
  }

  getManifest(datasetId: string): Promise<DatasetManifest> {
    return this.json(manifestPath(datasetId));
  }

  tileUrl(datasetId: string, t: TileAddress): string {
    return this.baseUrl + tilePath(datasetId, t);
  }
}

// Minimal WebSocket surface shared by browsers and the ws package.
export interface WebSocketLike {
  onopen: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
  send(data: string): void;
  close(): void;
}

export type WebSocketCtor = new (url: string) => WebSocketLike;

export type EnvelopeHandler = (env: Envelope) => void;

/**
 * One persistent session connection. `join` performs the handshake (first
 * frame out is JoinSession, first frame back is the Snapshot); after that,
 * inbound envelopes stream to subscribers in arrival order and `send`
 * stamps outgoing envelopes with a per-sender monotone seq.
 */
export class SessionSocket {
  private ws: WebSocketLike | null = null;
  private seq = 0;
  private handlers = new Set<EnvelopeHandler>();
  private sessionId = "";
  private senderId = "";

  constructor(
    private url: string,
    private wsCtor: WebSocketCtor = WebSocket as unknown as WebSocketCtor,
  ) {}

  onEnvelope(handler: EnvelopeHandler): () => void {
    this.handlers.add(handler);
    return () => this.handlers.delete(handler);
  }

  join(
    sessionId: string,
    senderId: string,
    payload: { display_name: string; device_class?: string },
  ): Promise<Record<string, unknown>> {
    this.sessionId = sessionId;
    this.senderId = senderId;
    return new Promise((resolve, reject) => {
      const ws = new this.wsCtor(this.url);
      this.ws = ws;
      let settled = false;
      ws.onerror = (ev) => {
        if (!settled) {
          settled = true;
          reject(ev instanceof Error ? ev : new Error("websocket error"));
        }
      };
      ws.onclose = () => {
        if (!settled) {
          settled = true;
          reject(new Error("connection closed before snapshot"));
        }
      };
      ws.onopen = () => {
        this.seq = 1;
        ws.send(
          encodeEnvelope({
            type: "JoinSession",
            session_id: sessionId,
            sender_id: senderId,
            seq: this.seq,
            payload,
          }),
        );
      };
      ws.onmessage = (ev) => {
        let env: Envelope;
        try {
          env = parseEnvelope(String(ev.data));
        } catch {
          return; // ignore unparseable frames
        }
        if (!settled) {
          if (env.type === "Snapshot") {
            settled = true;
            resolve(env.payload);
          } else if (env.type === "Error") {
            settled = true;
            reject(
              new ServerApiError(0, String(env.payload.code ?? "error"), String(env.payload.message ?? "join rejected")),
            );
          }
          return;
        }
        for (const h of [...this.handlers]) h(env);
      };
    });
  }

  send(type: MessageType, payload: Record<string, unknown>): void {
    if (this.ws === null) throw new Error("not connected");
    this.seq += 1;
    this.ws.send(
      encodeEnvelope({
        type,
        session_id: this.sessionId,
        sender_id: this.senderId,
        seq: this.seq,
        payload,
      }),
    );
  }

  joinGroup(groupId?: string): void {
    this.send("JoinGroup", groupId === undefined ? {} : { group_id: groupId });
  }

  setFocus(sliceIndex: number): void {
    this.send("SliceFocus", { slice_index: sliceIndex });
  }

  close(): void {
    this.ws?.close();
    this.ws = null;
  }
}
