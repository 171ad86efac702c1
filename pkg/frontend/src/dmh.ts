// Dead-man's-handle input: a hold, never a toggle.
//
// The vehicle stays armed only while fresh press-state messages keep
// flowing, so this module streams `pressed: true` at a fixed cadence while
// the key or on-screen button is physically held, and anything that could
// mean "the human is gone" -- key up, pointer up, window blur, tab hidden,
// page unload -- stops the stream and sends one explicit release.

export interface DmhSink {
  sendDmh(pressed: boolean): void;
}

export class DmhHold {
  held = false;
  private sources = new Set<string>();
  private timer: ReturnType<typeof setInterval> | null = null;

  constructor(
    private sink: DmhSink,
    private periodMs = 50,
    private onChange: (held: boolean) => void = () => {},
  ) {}

  // A source is one physical input ("key", "button"); the handle counts
  // as held while any source is down.
  press(source: string): void {
    this.sources.add(source);
    if (!this.held) {
      this.held = true;
      this.sink.sendDmh(true);
      this.timer = setInterval(() => this.sink.sendDmh(true), this.periodMs);
      this.onChange(true);
    }
  }

  release(source: string): void {
    this.sources.delete(source);
    if (this.held && this.sources.size === 0) {
      this.stop();
    }
  }

  // Force-release regardless of sources: blur, hidden tab, disconnect.
  releaseAll(): void {
    this.sources.clear();
    if (this.held) {
      this.stop();
    }
  }

  private stop(): void {
    this.held = false;
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
    this.sink.sendDmh(false);
    this.onChange(false);
  }
}

// Minimal slice of the DOM surface we listen on, injectable for tests.
export interface InputSurface {
  addEventListener(type: string, handler: (ev: any) => void): void;
}

export function bindDmhInputs(dmh: DmhHold, win: InputSurface,
                              doc: InputSurface & { hidden?: boolean },
                              holdButton?: InputSurface): void {
  win.addEventListener("keydown", (ev) => {
    if (ev.code === "Space" && !ev.repeat) {
      ev.preventDefault?.();
      dmh.press("key");
    }
  });
  win.addEventListener("keyup", (ev) => {
    if (ev.code === "Space") dmh.release("key");
  });
  win.addEventListener("blur", () => dmh.releaseAll());
  win.addEventListener("pagehide", () => dmh.releaseAll());
  doc.addEventListener("visibilitychange", () => {
    if (doc.hidden) dmh.releaseAll();
  });
  if (holdButton) {
    holdButton.addEventListener("pointerdown", () => dmh.press("button"));
    holdButton.addEventListener("pointerup", () => dmh.release("button"));
    holdButton.addEventListener("pointerleave", () => dmh.release("button"));
    holdButton.addEventListener("pointercancel", () => dmh.release("button"));
  }
}
