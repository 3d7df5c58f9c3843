/**
 * Single-page wiring: one WebSocket, pointer capture on the stroke
 * canvas, grasp-cycle controls, and live skeleton rendering.  All render
 * state comes from server events plus the local stroke echo.
 */
import { skeletonPoints } from "./kinematics.js";
import {
  buildEnd,
  buildGraspCycle,
  buildHello,
  buildPoint,
  ClientMessage,
  Effector,
  modelInfo,
  ModelInfo,
  parseServerMessage,
} from "./protocol.js";
import {
  drawSkeleton,
  drawStrokeEcho,
  projectSide,
  projectTop,
  renderPredictionPanel,
  Viewport,
} from "./render.js";
import { normalizePointer, StrokeTracker } from "./stroke.js";

const RECONNECT_MS = 1000;

function element<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

class App {
  private info!: ModelInfo;
  private socket: WebSocket | null = null;
  private tracker = new StrokeTracker();
  private tracking = false;
  private clockOrigin: number | null = null;
  private currentQ: number[] = [];

  private strokeCanvas = element<HTMLCanvasElement>("stroke-canvas");
  private sideCanvas = element<HTMLCanvasElement>("side-view");
  private topCanvas = element<HTMLCanvasElement>("top-view");
  private panel = element<HTMLElement>("prediction-panel");
  private status = element<HTMLElement>("status");
  private effectorSelect = element<HTMLSelectElement>("effector");
  private graspButton = element<HTMLButtonElement>("grasp");

  async start(): Promise<void> {
    const response = await fetch("/model/info");
    this.info = modelInfo.parse(await response.json());
    this.currentQ = [...this.info.home_q];
    this.bindPointerEvents();
    this.bindGraspControls();
    this.effectorSelect.addEventListener("change", () => this.sendHello());
    this.connect();
    this.drawArm();
    this.drawEcho();
  }

  private connect(): void {
    const scheme = location.protocol === "https:" ? "wss" : "ws";
    this.socket = new WebSocket(`${scheme}://${location.host}/ws`);
    this.socket.addEventListener("open", () => {
      this.setStatus(true);
      this.sendHello();
    });
    this.socket.addEventListener("message", (event) => {
      this.onServerMessage(String(event.data));
    });
    this.socket.addEventListener("close", () => {
      this.setStatus(false);
      if (this.tracking || this.tracker.points.length > 0) {
        // a dropped connection discards the in-flight stroke
        this.tracking = false;
        this.tracker.reset();
        this.drawEcho();
        this.panel.textContent = "connection lost; stroke discarded";
      }
      this.socket = null;
      setTimeout(() => this.connect(), RECONNECT_MS);
    });
  }

  private setStatus(connected: boolean): void {
    this.status.textContent = connected ? "connected" : "disconnected";
    this.status.className = connected ? "status ok" : "status down";
  }

  private send(message: ClientMessage): void {
    if (this.socket !== null && this.socket.readyState === WebSocket.OPEN) {
      this.socket.send(JSON.stringify(message));
    }
  }

  private sendHello(): void {
    this.send(buildHello(this.effectorSelect.value as Effector));
  }

  private strokeClock(): number {
    if (this.clockOrigin === null) {
      this.clockOrigin = performance.now();
    }
    return performance.now() - this.clockOrigin;
  }

  private bindPointerEvents(): void {
    const canvas = this.strokeCanvas;
    canvas.addEventListener("pointerdown", (event) => {
      canvas.setPointerCapture(event.pointerId);
      this.tracking = true;
      this.clockOrigin = null;
      this.tracker.reset();
      this.panel.textContent = "";
      this.capture(event);
    });
    canvas.addEventListener("pointermove", (event) => {
      if (this.tracking) {
        this.capture(event);
      }
    });
    const finish = () => {
      if (!this.tracking) {
        return;
      }
      this.tracking = false;
      if (this.tracker.canEnd()) {
        this.send(buildEnd());
      } else {
        this.panel.textContent = "stroke too short; try a longer trace";
      }
      this.tracker.reset();
    };
    canvas.addEventListener("pointerup", finish);
    canvas.addEventListener("pointercancel", finish);
  }

  private capture(event: PointerEvent): void {
    const rect = this.strokeCanvas.getBoundingClientRect();
    const { u, v } = normalizePointer(
      event.clientX - rect.left,
      event.clientY - rect.top,
      rect.width,
      rect.height,
    );
    const point = this.tracker.add(this.strokeClock(), u, v);
    if (point !== null) {
      this.send(buildPoint(point.t_ms, point.u, point.v));
      this.drawEcho();
    }
  }

  private bindGraspControls(): void {
    this.graspButton.addEventListener("click", () => {
      const amplitude = Number(
        element<HTMLInputElement>("grasp-amplitude").value,
      );
      const period = Number(element<HTMLInputElement>("grasp-period").value);
      const cycles = Number(element<HTMLInputElement>("grasp-cycles").value);
      this.panel.textContent = "";
      // the server needs an anchor point before the oscillation
      this.send(buildPoint(0, 0.5, 0.5));
      this.send(buildGraspCycle(amplitude, period, cycles));
      this.send(buildEnd());
    });
  }

  private onServerMessage(raw: string): void {
    const message = parseServerMessage(raw);
    if (message === null) {
      console.warn("skipping malformed server message", raw);
      return;
    }
    if (message.type === "arm_state") {
      this.currentQ = message.q;
      this.drawArm();
    } else if (message.type === "prediction") {
      renderPredictionPanel(this.panel, message, this.info.class_labels);
    } else {
      this.panel.textContent = `${message.code}: ${message.message}`;
    }
  }

  private drawArm(): void {
    const points = skeletonPoints(this.info.chain, this.currentQ);
    const side: Viewport = {
      width: this.sideCanvas.width,
      height: this.sideCanvas.height,
      span_m: 2.2,
      center: [0.3, 0.7],
    };
    const top: Viewport = {
      width: this.topCanvas.width,
      height: this.topCanvas.height,
      span_m: 2.2,
      center: [0.3, 0.0],
    };
    drawSkeleton(
      this.sideCanvas.getContext("2d")!,
      points,
      projectSide,
      side,
    );
    drawSkeleton(this.topCanvas.getContext("2d")!, points, projectTop, top);
  }

  private drawEcho(): void {
    drawStrokeEcho(
      this.strokeCanvas.getContext("2d")!,
      this.tracker.points,
      this.strokeCanvas.width,
      this.strokeCanvas.height,
    );
  }
}

new App().start().catch((err) => {
  document.body.textContent = `failed to start: ${err}`;
});
