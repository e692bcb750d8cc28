// Primitive renderer: the server sends geometry, the cockpit replays it
// onto a 2D canvas. Drawing is a pure function of (frame, hud), so
// redrawing the same frame yields identical pixels. The canvas is sized
// to the camera image, which keeps view coordinates 1:1 with pixels and
// puts the annulus center at the canvas center.

import type { StateFrameMessage } from "./protocol.js";

// just the context surface the renderer touches; CanvasRenderingContext2D
// satisfies it, and tests substitute a command recorder
export interface Draw2d {
  fillStyle: string | CanvasGradient | CanvasPattern;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
  font: string;
  fillRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  arc(x: number, y: number, radius: number, startAngle: number, endAngle: number): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  closePath(): void;
  fill(): void;
  stroke(): void;
  fillText(text: string, x: number, y: number): void;
}

export interface HudState {
  correctionOn: boolean;
  stale: boolean;
  banner: string | null;
}

export const BACKGROUND_BLUE = "#1e56a0";
export const OUT_OF_VIEW_TEXT = "target out of view";
export const STALE_TEXT = "stale frame";

const SPHERE_FILL = "#e4572e";
const CUBE_FILL = "#8d99ae";
const CUBE_EDGE = "#2b2d42";
const ANNULUS_STROKE = "#ffffff";
const TEXT_FILL = "#ffffff";
const WARN_FILL = "#ffd166";
const BANNER_FILL = "#b3001b";
const HUD_FONT = "14px ui-monospace, monospace";

export function renderView(
  draw: Draw2d,
  width: number,
  height: number,
  frame: StateFrameMessage | null,
  hud: HudState,
): void {
  draw.fillStyle = BACKGROUND_BLUE;
  draw.fillRect(0, 0, width, height);

  if (frame === null) {
    draw.fillStyle = TEXT_FILL;
    draw.font = HUD_FONT;
    draw.fillText("waiting for frames", 12, 22);
  } else {
    drawScene(draw, width, height, frame);
    drawHud(draw, frame, hud);
  }

  if (hud.stale) {
    draw.fillStyle = WARN_FILL;
    draw.font = HUD_FONT;
    draw.fillText(STALE_TEXT, width - 110, 22);
  }
  if (hud.banner !== null) {
    draw.fillStyle = BANNER_FILL;
    draw.fillRect(0, height - 28, width, 28);
    draw.fillStyle = TEXT_FILL;
    draw.font = HUD_FONT;
    draw.fillText(hud.banner, 12, height - 10);
  }
}

function drawScene(draw: Draw2d, width: number, height: number, frame: StateFrameMessage): void {
  const view = frame.view;
  if (view.visible) {
    // cubes first, sphere on top, matching their depth order in the scene
    for (const polygon of view.cube_polygons) {
      if (polygon.length < 3) continue; // behind the near clip plane
      draw.fillStyle = CUBE_FILL;
      draw.strokeStyle = CUBE_EDGE;
      draw.lineWidth = 1;
      draw.beginPath();
      draw.moveTo(polygon[0][0], polygon[0][1]);
      for (let i = 1; i < polygon.length; i++) {
        draw.lineTo(polygon[i][0], polygon[i][1]);
      }
      draw.closePath();
      draw.fill();
      draw.stroke();
    }
    draw.fillStyle = SPHERE_FILL;
    draw.beginPath();
    draw.arc(view.sphere_center[0], view.sphere_center[1], view.sphere_radius_px, 0, 2 * Math.PI);
    draw.fill();
  } else {
    draw.fillStyle = WARN_FILL;
    draw.font = HUD_FONT;
    draw.fillText(OUT_OF_VIEW_TEXT, width / 2 - 70, height / 2);
  }

  // success annulus over the scene so the target ring stays readable
  draw.strokeStyle = ANNULUS_STROKE;
  draw.lineWidth = 2;
  for (const radius of view.annulus_px) {
    draw.beginPath();
    draw.arc(width / 2, height / 2, radius, 0, 2 * Math.PI);
    draw.stroke();
  }
}

function drawHud(draw: Draw2d, frame: StateFrameMessage, hud: HudState): void {
  draw.fillStyle = TEXT_FILL;
  draw.font = HUD_FONT;
  draw.fillText(`t ${frame.elapsed_s.toFixed(2)} s`, 12, 22);
  draw.fillText(`correction ${hud.correctionOn ? "ON" : "OFF"}`, 12, 40);
  draw.fillText(`theta ${frame.theta_deg.toFixed(1)} deg`, 12, 58);
}
