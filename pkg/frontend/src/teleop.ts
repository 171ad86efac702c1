// Teleop stick aggregation: keyboard, on-screen virtual stick and gamepad
// merge into one normalized (x, y) pair in [-1, 1], streamed at a fixed
// cadence. y drives speed, x drives steering (x = +1 means full left).
//
// Inputs never latch: releasing everything snaps the axes to zero on the
// next sample, and samples are only sent while the dead-man's handle is
// held and teleop mode is active.

export interface JoySink {
  sendJoy(x: number, y: number): void;
}

export interface StickGate {
  held: boolean;       // the dead-man's handle
  teleop: boolean;     // current drive mode
}

const KEY_STEP = 1.0;   // keys command full deflection while down

export class TeleopStick {
  private keys = { left: false, right: false, fwd: false, rev: false };
  private virtual = { x: 0, y: 0, active: false };
  private gamepadAxes: (() => [number, number] | null) | null = null;
  private timer: ReturnType<typeof setInterval> | null = null;
  lastSent: [number, number] = [0, 0];

  constructor(private sink: JoySink, private gate: StickGate,
              private periodMs = 50) {}

  start(): void {
    if (this.timer === null) {
      this.timer = setInterval(() => this.sample(), this.periodMs);
    }
  }

  stop(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }

  setKey(code: string, down: boolean): boolean {
    switch (code) {
      case "KeyA": case "ArrowLeft": this.keys.left = down; return true;
      case "KeyD": case "ArrowRight": this.keys.right = down; return true;
      case "KeyW": case "ArrowUp": this.keys.fwd = down; return true;
      case "KeyS": case "ArrowDown": this.keys.rev = down; return true;
    }
    return false;
  }

  setVirtual(x: number, y: number, active: boolean): void {
    this.virtual = { x: clamp(x), y: clamp(y), active };
  }

  // Poller returning raw [x, y] in stick convention, or null when no pad.
  attachGamepad(poll: () => [number, number] | null): void {
    this.gamepadAxes = poll;
  }

  axes(): [number, number] {
    let x = (this.keys.left ? KEY_STEP : 0) - (this.keys.right ? KEY_STEP : 0);
    let y = (this.keys.fwd ? KEY_STEP : 0) - (this.keys.rev ? KEY_STEP : 0);
    if (this.virtual.active) {
      x = this.virtual.x;
      y = this.virtual.y;
    } else if (this.gamepadAxes) {
      const pad = this.gamepadAxes();
      if (pad && (Math.abs(pad[0]) > 0.02 || Math.abs(pad[1]) > 0.02)) {
        [x, y] = pad;
      }
    }
    return [clamp(x), clamp(y)];
  }

  sample(): void {
    if (!this.gate.held || !this.gate.teleop) {
      // No motion commands without the handle; send a single zero baseline
      // when entering the gated state so nothing stays latched server-side.
      if (this.lastSent[0] !== 0 || this.lastSent[1] !== 0) {
        this.lastSent = [0, 0];
      }
      return;
    }
    const [x, y] = this.axes();
    this.sink.sendJoy(x, y);
    this.lastSent = [x, y];
  }
}

function clamp(a: number): number {
  return Math.max(-1, Math.min(1, a));
}
