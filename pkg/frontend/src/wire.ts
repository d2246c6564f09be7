// Message envelope contract shared with the session server.

export const MESSAGE_TYPES = [
  "JoinSession",
  "LeaveSession",
  "JoinGroup",
  "SliceFocus",
  "AvatarPose",
  "StrokeBegin",
  "StrokeAppend",
  "StrokeEnd",
  "ContourCommit",
  "MeshRebuilt",
  "GradeSubmit",
  "FilterSet",
  "Snapshot",
  "Error",
] as const;

export type MessageType = (typeof MESSAGE_TYPES)[number];

export interface Envelope {
  type: MessageType;
  session_id: string;
  sender_id: string;
  seq: number;
  payload: Record<string, unknown>;
}

const TYPE_SET: ReadonlySet<string> = new Set(MESSAGE_TYPES);

export class MalformedEnvelope extends Error {}

export function parseEnvelope(text: string): Envelope {
  let doc: unknown;
  try {
    doc = JSON.parse(text);
  } catch {
    throw new MalformedEnvelope("frame is not valid JSON");
  }
  if (typeof doc !== "object" || doc === null || Array.isArray(doc)) {
    throw new MalformedEnvelope("envelope must be a JSON object");
  }
  const d = doc as Record<string, unknown>;
  for (const key of ["type", "session_id", "sender_id", "seq"]) {
    if (!(key in d)) throw new MalformedEnvelope(`envelope missing '${key}'`);
  }
  if (typeof d.type !== "string" || !TYPE_SET.has(d.type)) {
    throw new MalformedEnvelope(`unknown message type ${JSON.stringify(d.type)}`);
  }
  if (typeof d.session_id !== "string" || typeof d.sender_id !== "string") {
    throw new MalformedEnvelope("session_id and sender_id must be strings");
  }
  if (typeof d.seq !== "number" || !Number.isInteger(d.seq)) {
    throw new MalformedEnvelope("seq must be an integer");
  }
  const payload = d.payload ?? {};
  if (typeof payload !== "object" || payload === null || Array.isArray(payload)) {
    throw new MalformedEnvelope("payload must be an object");
  }
  return {
    type: d.type as MessageType,
    session_id: d.session_id,
    sender_id: d.sender_id,
    seq: d.seq,
    payload: payload as Record<string, unknown>,
  };
}

export function encodeEnvelope(env: Envelope): string {
  return JSON.stringify(env);
}
