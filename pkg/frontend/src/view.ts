// World <-> canvas transforms and the goal-click gesture.
//
// Top-down view: world x points screen-right, world y points screen-up,
// camera centered on a focus point (normally the cart).

export interface Camera {
  focusX: number;
  focusY: number;
  scale: number;       // pixels per metre
  width: number;
  height: number;
}

export function worldToCanvas(cam: Camera, x: number, y: number): [number, number] {
  return [
    cam.width / 2 + (x - cam.focusX) * cam.scale,
    cam.height / 2 - (y - cam.focusY) * cam.scale,
  ];
}

export function canvasToWorld(cam: Camera, px: number, py: number): [number, number] {
  return [
    cam.focusX + (px - cam.width / 2) / cam.scale,
    cam.focusY - (py - cam.height / 2) / cam.scale,
  ];
}

// Click places the goal position; dragging before release points its
// heading (a short tap keeps the cart's current heading).
export interface GoalGesture {
  x: number;
  y: number;
  heading: number;
  draggedFar: boolean;
}

export function goalFromDrag(cam: Camera, downPx: [number, number],
                             upPx: [number, number],
                             fallbackHeading: number): GoalGesture {
  const [x, y] = canvasToWorld(cam, downPx[0], downPx[1]);
  const [ux, uy] = canvasToWorld(cam, upPx[0], upPx[1]);
  const dx = ux - x;
  const dy = uy - y;
  const far = Math.hypot(dx, dy) * cam.scale > 12;   // > 12 px of drag
  return {
    x, y,
    heading: far ? Math.atan2(dy, dx) : fallbackHeading,
    draggedFar: far,
  };
}
