// One WebSocket session against the gateway: sends operator frames,
// decodes server frames, tracks the latest telemetry and its freshness.
//
// Works with the browser WebSocket and with the `ws` package (which
// implements the same onopen/onmessage surface) so the end-to-end tests
// can drive it from node.

import {
  DriveMode,
  PathMessage,
  Role,
  ServerMessage,
  Telemetry,
  encode,
  parseServerMessage,
} from "./protocol.js";

export interface WebSocketLike {
  send(data: string): void;
  close(): void;
  onopen: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
}

export type SessionState = "connecting" | "open" | "closed";

export class ConsoleSession {
  state: SessionState = "connecting";
  role: Role | null = null;
  telemetry: Telemetry | null = null;
  telemetryAtMs = 0;
  path: PathMessage["poses"] = [];
  lastError: string | null = null;
  goalStatus = "idle";
  goalDiagnostic: string | null = null;

  onUpdate: () => void = () => {};

  constructor(private ws: WebSocketLike, wantedRole: Role,
              private now: () => number = () => Date.now()) {
    ws.onopen = () => {
      ws.send(encode.hello(wantedRole));
    };
    ws.onmessage = (ev) => {
      const msg = parseServerMessage(String(ev.data));
      if (msg) this.handle(msg);
    };
    ws.onclose = () => {
      this.state = "closed";
      this.onUpdate();
    };
    ws.onerror = () => {
      this.state = "closed";
      this.onUpdate();
    };
  }

  private handle(msg: ServerMessage): void {
    switch (msg.type) {
      case "welcome":
        this.state = "open";
        this.role = msg.role;
        break;
      case "telemetry": {
        const { type: _type, ...rest } = msg as { type: string } & Telemetry;
        this.telemetry = rest as Telemetry;
        this.telemetryAtMs = this.now();
        break;
      }
      case "path":
        this.path = msg.poses;
        break;
      case "goal_status":
        this.goalStatus = msg.status;
        this.goalDiagnostic = msg.diagnostic;
        break;
      case "err":
        this.lastError = msg.msg;
        break;
      case "pong":
        break;
    }
    this.onUpdate();
  }

  // Telemetry older than a second means the link is effectively dead.
  stale(staleAfterMs = 1000): boolean {
    return this.telemetry === null
      || this.now() - this.telemetryAtMs > staleAfterMs;
  }

  get isOperator(): boolean {
    return this.role === "operator";
  }

  sendDmh(pressed: boolean): void {
    this.send(encode.dmh(pressed));
  }

  sendJoy(x: number, y: number): void {
    this.send(encode.joy(x, y));
  }

  ignite(): void {
    this.send(encode.ignite());
  }

  setMode(mode: DriveMode): void {
    this.send(encode.mode(mode));
  }

  sendGoto(x: number, y: number, heading: number): void {
    this.send(encode.goto(x, y, heading));
  }

  cancelGoal(): void {
    this.send(encode.cancel());
  }

  close(): void {
    this.ws.close();
  }

  private send(data: string): void {
    if (this.state !== "closed") {
      try {
        this.ws.send(data);
      } catch {
        this.state = "closed";
        this.onUpdate();
      }
    }
  }
}

export function gatewayUrl(params: URLSearchParams,
                           defaultHost: string): string {
  const host = params.get("host") || defaultHost || "127.0.0.1";
  const port = params.get("port") || "8720";
  return `ws://${host}:${port}`;
}

export function wantedRole(params: URLSearchParams): Role {
  return params.get("role") === "observer" ? "observer" : "operator";
}
