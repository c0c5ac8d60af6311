// Planar map canvas: pose arrow, breadcrumb trail, uploaded mission (solid)
// vs draft waypoints (dashed, numbered), and a scale bar. Local meters, no
// tile provider. Click adds a draft waypoint; dragging a draft marker moves it.

import { UiState } from "./state.js";

const MARKER_HIT_PX = 12;

export class MapView {
  private readonly ctx: CanvasRenderingContext2D | null;
  private scale = 4; // px per meter
  private centerX = 0;
  private centerY = 0;
  private dragging: number | null = null;

  constructor(private readonly canvas: HTMLCanvasElement,
              private readonly state: UiState) {
    this.ctx = canvas.getContext("2d");
    canvas.addEventListener("mousedown", (ev) => this.onDown(ev));
    canvas.addEventListener("mousemove", (ev) => this.onMove(ev));
    canvas.addEventListener("mouseup", (ev) => this.onUp(ev));
    state.subscribe(() => this.render());
  }

  toScreen(x: number, y: number): [number, number] {
    // +y north is up on screen.
    return [
      this.canvas.width / 2 + (x - this.centerX) * this.scale,
      this.canvas.height / 2 - (y - this.centerY) * this.scale,
    ];
  }

  toWorld(px: number, py: number): [number, number] {
    return [
      this.centerX + (px - this.canvas.width / 2) / this.scale,
      this.centerY - (py - this.canvas.height / 2) / this.scale,
    ];
  }

  private canvasPoint(ev: MouseEvent): [number, number] {
    const rect = this.canvas.getBoundingClientRect();
    return [ev.clientX - rect.left, ev.clientY - rect.top];
  }

  private hitDraft(px: number, py: number): number | null {
    for (let i = this.state.draft.length - 1; i >= 0; i--) {
      const [sx, sy] = this.toScreen(this.state.draft[i].x, this.state.draft[i].y);
      if (Math.hypot(sx - px, sy - py) <= MARKER_HIT_PX) return i;
    }
    return null;
  }

  private onDown(ev: MouseEvent): void {
    const [px, py] = this.canvasPoint(ev);
    this.dragging = this.hitDraft(px, py);
  }

  private onMove(ev: MouseEvent): void {
    if (this.dragging === null) return;
    const [px, py] = this.canvasPoint(ev);
    const [x, y] = this.toWorld(px, py);
    this.state.moveDraftWaypoint(this.dragging, round1(x), round1(y));
  }

  private onUp(ev: MouseEvent): void {
    const [px, py] = this.canvasPoint(ev);
    if (this.dragging === null) {
      const [x, y] = this.toWorld(px, py);
      this.state.addDraftWaypoint(round1(x), round1(y));
    }
    this.dragging = null;
  }

  render(): void {
    const ctx = this.ctx;
    if (!ctx) return; // headless test environment
    const { width, height } = this.canvas;
    const pos = this.state.snapshot.position;
    if (pos) {
      this.centerX = pos.x;
      this.centerY = pos.y;
    }
    ctx.fillStyle = "#0b1d2a";
    ctx.fillRect(0, 0, width, height);

    // breadcrumbs
    ctx.strokeStyle = "#2f6f8f";
    ctx.lineWidth = 1;
    ctx.beginPath();
    this.state.breadcrumbs.forEach(([x, y], i) => {
      const [sx, sy] = this.toScreen(x, y);
      if (i === 0) ctx.moveTo(sx, sy);
      else ctx.lineTo(sx, sy);
    });
    ctx.stroke();

    this.drawWaypoints(ctx, this.state.uploaded, "#4dd2ff", false);
    this.drawWaypoints(ctx, this.state.draft, "#ffb84d", true);

    if (pos) {
      const [sx, sy] = this.toScreen(pos.x, pos.y);
      ctx.save();
      ctx.translate(sx, sy);
      ctx.rotate(-pos.heading + Math.PI / 2);
      ctx.fillStyle = "#7CFC9A";
      ctx.beginPath();
      ctx.moveTo(0, -10);
      ctx.lineTo(6, 8);
      ctx.lineTo(-6, 8);
      ctx.closePath();
      ctx.fill();
      ctx.restore();
    }

    // scale bar: 10 m
    const bar = 10 * this.scale;
    ctx.strokeStyle = "#cfd8dc";
    ctx.lineWidth = 2;
    ctx.beginPath();
    ctx.moveTo(16, height - 16);
    ctx.lineTo(16 + bar, height - 16);
    ctx.stroke();
    ctx.fillStyle = "#cfd8dc";
    ctx.font = "11px sans-serif";
    ctx.fillText("10 m", 16, height - 22);
  }

  private drawWaypoints(ctx: CanvasRenderingContext2D,
                        waypoints: Array<{ x: number; y: number; radius: number }>,
                        color: string, dashed: boolean): void {
    ctx.strokeStyle = color;
    ctx.fillStyle = color;
    ctx.setLineDash(dashed ? [4, 3] : []);
    ctx.lineWidth = 1.5;
    waypoints.forEach((wp, i) => {
      const [sx, sy] = this.toScreen(wp.x, wp.y);
      ctx.beginPath();
      ctx.arc(sx, sy, wp.radius * this.scale, 0, 2 * Math.PI);
      ctx.stroke();
      ctx.beginPath();
      ctx.arc(sx, sy, 3, 0, 2 * Math.PI);
      ctx.fill();
      ctx.font = "11px sans-serif";
      ctx.fillText(String(i + 1), sx + 6, sy - 6); // ordered badge
    });
    ctx.setLineDash([]);
  }
}

function round1(v: number): number {
  return Math.round(v * 10) / 10;
}
