// Gateway session schema, version 1. Mirrors protocol.md in the repo root;
// that document is the contract, this file just types it.

export const PROTOCOL_VERSION = 1;

export type Role = "operator" | "observer";
export type DriveMode = "teleop" | "auto";
export type SafetyModeName = "PowerOff" | "IgnitionPending" | "Armed" | "Fault";

export interface Telemetry {
  t: number;
  x: number;
  y: number;
  heading: number;
  v: number;
  steer_angle: number;
  actuator_ext: number;
  v_battery: number;
  safety_mode: SafetyModeName;
  stack_safety_mode: SafetyModeName;
  mode: DriveMode;
  dmh_held: boolean;
  steer_clamp_count: number;
  angle_clamp_count: number;
  joy_ignored_count: number;
  goal_status: "idle" | "running" | "success" | "aborted";
  goal_diagnostic: string | null;
  goal_rejected: string | null;
  watchdog_age: number;
}

export interface PathMessage {
  type: "path";
  poses: [number, number, number][];
}

export interface GoalStatusMessage {
  type: "goal_status";
  status: string;
  diagnostic: string | null;
}

export type ServerMessage =
  | ({ type: "telemetry" } & Telemetry)
  | ({ type: "welcome"; role: Role; dmh_freshness_s: number })
  | PathMessage
  | GoalStatusMessage
  | { type: "err"; msg: string }
  | { type: "pong"; echo?: unknown };

export function parseServerMessage(raw: string): ServerMessage | null {
  let data: unknown;
  try {
    data = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof data !== "object" || data === null) return null;
  const msg = data as Record<string, unknown>;
  if (msg.ver !== PROTOCOL_VERSION || typeof msg.type !== "string") return null;
  return msg as unknown as ServerMessage;
}

function frame(type: string, fields: Record<string, unknown> = {}): string {
  return JSON.stringify({ ver: PROTOCOL_VERSION, type, ...fields });
}

export const encode = {
  hello: (role: Role) => frame("hello", { role }),
  dmh: (pressed: boolean) => frame("dmh", { pressed }),
  joy: (x: number, y: number) => frame("joy", { x, y }),
  ignite: () => frame("ignite"),
  mode: (mode: DriveMode) => frame("mode", { mode }),
  goto: (x: number, y: number, heading: number) =>
    frame("goto", { x, y, heading }),
  cancel: () => frame("cancel"),
  ping: (echo?: unknown) => frame("ping", { echo }),
};
