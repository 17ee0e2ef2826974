// Wire types and codecs for the balance endpoint protocol.
//
// Outgoing messages are serialized with a fixed key order so the bytes on
// the wire are reproducible; incoming messages are structurally validated
// and anything malformed is dropped by the caller (never rendered).

export interface HelloMessage {
  type: "hello";
  f_max: number;
  delta_margin: [number, number];
  foot_extent: [number, number];
  rate: number;
  n_joints: number;
}

export interface StateMessage {
  type: "state";
  t: number;
  s: number;
  q: number[];
  zmp: number | null;
  inside_margin: boolean;
  inside_support: boolean;
  f_applied: number;
  frames: [number, number][];
  failure: string | null;
}

export interface ErrorMessage {
  type: "error";
  message: string;
}

export type ServerMessage = HelloMessage | StateMessage | ErrorMessage;

export function encodeForce(fH1: number, fH2 = 0): string {
  return `{"type": "force", "f_h1": ${jsonNumber(fH1)}, "f_h2": ${jsonNumber(fH2)}}`;
}

export function encodeReset(): string {
  return '{"type": "reset"}';
}

export function encodeSetProfile(kind: string, M: number, h: number): string {
  return `{"type": "set_profile", "kind": ${JSON.stringify(kind)}, "M": ${jsonNumber(M)}, "h": ${jsonNumber(h)}}`;
}

function jsonNumber(v: number): string {
  if (!Number.isFinite(v)) {
    throw new Error(`cannot encode non-finite number ${v}`);
  }
  return JSON.stringify(v);
}

function isNumber(v: unknown): v is number {
  return typeof v === "number" && Number.isFinite(v);
}

function isPair(v: unknown): v is [number, number] {
  return Array.isArray(v) && v.length === 2 && isNumber(v[0]) && isNumber(v[1]);
}

/** Parse and validate one server message; null means "drop it". */
export function parseServerMessage(raw: string): ServerMessage | null {
  let data: unknown;
  try {
    data = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof data !== "object" || data === null) {
    return null;
  }
  const msg = data as Record<string, unknown>;
  switch (msg.type) {
    case "hello":
      if (
        isNumber(msg.f_max) &&
        isPair(msg.delta_margin) &&
        isPair(msg.foot_extent) &&
        isNumber(msg.rate) &&
        isNumber(msg.n_joints)
      ) {
        return msg as unknown as HelloMessage;
      }
      return null;
    case "state": {
      const qOk = Array.isArray(msg.q) && msg.q.every(isNumber);
      const framesOk = Array.isArray(msg.frames) && msg.frames.every(isPair);
      const zmpOk = msg.zmp === null || isNumber(msg.zmp);
      const failureOk = msg.failure === null || typeof msg.failure === "string";
      if (
        isNumber(msg.t) &&
        isNumber(msg.s) &&
        qOk &&
        zmpOk &&
        typeof msg.inside_margin === "boolean" &&
        typeof msg.inside_support === "boolean" &&
        isNumber(msg.f_applied) &&
        framesOk &&
        failureOk
      ) {
        return msg as unknown as StateMessage;
      }
      return null;
    }
    case "error":
      if (typeof msg.message === "string") {
        return msg as unknown as ErrorMessage;
      }
      return null;
    default:
      return null;
  }
}

/** Display clamp for the force input: 0 to 1.25 * f_max. */
export function clampForce(value: number, fMax: number): number {
  if (!Number.isFinite(value)) {
    return 0;
  }
  return Math.min(Math.max(value, 0), 1.25 * fMax);
}
