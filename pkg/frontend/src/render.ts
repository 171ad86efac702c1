// Canvas dashboard: top-down pose trace with the planned path, plus the
// instrument readouts. Strictly read-only over telemetry.

import { Telemetry } from "./protocol.js";
import { Camera, worldToCanvas } from "./view.js";

const MODE_COLORS: Record<string, string> = {
  PowerOff: "#666",
  IgnitionPending: "#c90",
  Armed: "#2a2",
  Fault: "#c22",
};

export class Dashboard {
  private trace: [number, number][] = [];
  camera: Camera;

  constructor(private canvas: HTMLCanvasElement) {
    this.camera = {
      focusX: 0, focusY: 0, scale: 60,
      width: canvas.width, height: canvas.height,
    };
  }

  recordPose(t: Telemetry): void {
    const last = this.trace[this.trace.length - 1];
    if (!last || Math.hypot(t.x - last[0], t.y - last[1]) > 0.01) {
      this.trace.push([t.x, t.y]);
      if (this.trace.length > 5000) this.trace.shift();
    }
  }

  draw(t: Telemetry | null, path: [number, number, number][],
       stale: boolean): void {
    const ctx = this.canvas.getContext("2d");
    if (!ctx) return;
    const cam = this.camera;
    cam.width = this.canvas.width;
    cam.height = this.canvas.height;
    if (t) {
      cam.focusX = t.x;
      cam.focusY = t.y;
    }

    ctx.fillStyle = "#101418";
    ctx.fillRect(0, 0, cam.width, cam.height);
    this.grid(ctx);

    if (path.length > 1) {
      ctx.strokeStyle = "#39f";
      ctx.lineWidth = 2;
      ctx.beginPath();
      path.forEach(([x, y], i) => {
        const [px, py] = worldToCanvas(cam, x, y);
        i === 0 ? ctx.moveTo(px, py) : ctx.lineTo(px, py);
      });
      ctx.stroke();
    }

    if (this.trace.length > 1) {
      ctx.strokeStyle = "#8d8";
      ctx.lineWidth = 1.5;
      ctx.beginPath();
      this.trace.forEach(([x, y], i) => {
        const [px, py] = worldToCanvas(cam, x, y);
        i === 0 ? ctx.moveTo(px, py) : ctx.lineTo(px, py);
      });
      ctx.stroke();
    }

    if (t) this.cart(ctx, t);

    if (stale) {
      ctx.fillStyle = "rgba(20, 20, 20, 0.65)";
      ctx.fillRect(0, 0, cam.width, cam.height);
      ctx.fillStyle = "#fb3";
      ctx.font = "bold 22px system-ui";
      ctx.textAlign = "center";
      ctx.fillText("TELEMETRY STALE", cam.width / 2, cam.height / 2);
    }
  }

  private grid(ctx: CanvasRenderingContext2D): void {
    const cam = this.camera;
    ctx.strokeStyle = "#1d242c";
    ctx.lineWidth = 1;
    const step = cam.scale;   // one metre
    const x0 = Math.floor(cam.focusX - cam.width / 2 / step);
    const y0 = Math.floor(cam.focusY - cam.height / 2 / step);
    for (let gx = x0; gx <= x0 + cam.width / step + 1; gx++) {
      const [px] = worldToCanvas(cam, gx, 0);
      ctx.beginPath();
      ctx.moveTo(px, 0);
      ctx.lineTo(px, cam.height);
      ctx.stroke();
    }
    for (let gy = y0; gy <= y0 + cam.height / step + 1; gy++) {
      const [, py] = worldToCanvas(cam, 0, gy);
      ctx.beginPath();
      ctx.moveTo(0, py);
      ctx.lineTo(cam.width, py);
      ctx.stroke();
    }
  }

  private cart(ctx: CanvasRenderingContext2D, t: Telemetry): void {
    const cam = this.camera;
    const [px, py] = worldToCanvas(cam, t.x, t.y);
    ctx.save();
    ctx.translate(px, py);
    ctx.rotate(-t.heading);
    ctx.fillStyle = MODE_COLORS[t.safety_mode] ?? "#999";
    ctx.fillRect(-0.6 * cam.scale, -0.35 * cam.scale,
                 1.2 * cam.scale, 0.7 * cam.scale);
    // Front wheel direction whisker.
    ctx.strokeStyle = "#fff";
    ctx.lineWidth = 2;
    ctx.beginPath();
    ctx.moveTo(0.45 * cam.scale, 0);
    ctx.lineTo(0.45 * cam.scale + 0.5 * cam.scale * Math.cos(-t.steer_angle),
               0.5 * cam.scale * Math.sin(-t.steer_angle));
    ctx.stroke();
    ctx.restore();
  }
}

export function renderReadouts(root: {
  mode: HTMLElement; speed: HTMLElement; wheel: HTMLElement;
  extension: HTMLElement; extensionBar: HTMLElement; battery: HTMLElement;
  watchdog: HTMLElement; clamps: HTMLElement; goal: HTMLElement;
  error: HTMLElement;
}, t: Telemetry | null, goalStatus: string, diag: string | null,
   lastError: string | null): void {
  if (!t) {
    root.mode.textContent = "NO LINK";
    root.mode.style.background = "#444";
    return;
  }
  root.mode.textContent = t.safety_mode;
  root.mode.style.background = MODE_COLORS[t.safety_mode] ?? "#444";
  root.speed.textContent = `${t.v.toFixed(2)} m/s`;
  root.wheel.textContent = `${(t.steer_angle * 180 / Math.PI).toFixed(1)} deg`;
  root.extension.textContent = `${t.actuator_ext.toFixed(0)} mm`;
  root.extensionBar.style.width = `${(t.actuator_ext / 250 * 100).toFixed(1)}%`;
  root.battery.textContent = `${t.v_battery.toFixed(2)} V`;
  root.watchdog.textContent = `${(t.watchdog_age * 1000).toFixed(0)} ms`;
  root.clamps.textContent =
    `${t.steer_clamp_count + t.angle_clamp_count} clamps, ` +
    `${t.joy_ignored_count} joy ignored`;
  root.goal.textContent = diag ? `${goalStatus}: ${diag}` : goalStatus;
  root.error.textContent = lastError ?? "";
}
