/** Browser entry point: wires the transport, pointer loop, and state reducer
 * to a canvas that renders the virtual presentation screen.
 */

import {
  applyUpdate,
  CORNER_NAMES,
  initialState,
  SCREEN_H,
  SCREEN_W,
  type UiState,
} from "./state.js";
import { PointerLoop, normalizePointer, type LaserSink } from "./pointer.js";
import { SessionTransport } from "./transport.js";

const CLICK_FLASH_MS = 600;
const TICKER_SHOWN = 8;
const CALIBRATION_TARGETS: ReadonlyArray<readonly [number, number]> = [
  [0, 0],
  [1, 0],
  [1, 1],
  [0, 1],
];

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

function main(): void {
  const canvas = el<HTMLCanvasElement>("screen");
  const ctx = canvas.getContext("2d");
  if (ctx === null) {
    throw new Error("2d canvas unsupported");
  }
  const urlInput = el<HTMLInputElement>("url");
  const connectBtn = el<HTMLButtonElement>("connect");
  const calibrateBtn = el<HTMLButtonElement>("calibrate");
  const resetBtn = el<HTMLButtonElement>("reset");
  const beamBtn = el<HTMLButtonElement>("beam");
  const statusLine = el<HTMLDivElement>("status");
  const tickerList = el<HTMLUListElement>("ticker");

  let state: UiState = initialState();

  const transport = new SessionTransport((update) => {
    state = applyUpdate(state, update);
    render();
  });

  const sink: LaserSink = {
    send: (msg) => {
      transport.send(msg);
    },
    get ready() {
      return transport.connected;
    },
  };
  const loop = new PointerLoop(sink);

  connectBtn.addEventListener("click", () => {
    if (transport.connected) {
      loop.stop();
      transport.disconnect();
    } else {
      transport.connect(urlInput.value);
      loop.start();
    }
    render();
  });

  calibrateBtn.addEventListener("click", () => {
    transport.send({ type: "start_calibration" });
  });

  resetBtn.addEventListener("click", () => {
    transport.send({ type: "reset" });
  });

  function setBeam(on: boolean): void {
    loop.setBeam(on);
    state = applyUpdate(state, { type: "beam", on });
    render();
  }

  beamBtn.addEventListener("click", () => setBeam(!loop.beamOn));
  window.addEventListener("keydown", (ev) => {
    if (ev.code === "Space" && !ev.repeat) {
      ev.preventDefault();
      setBeam(true);
    }
  });
  window.addEventListener("keyup", (ev) => {
    if (ev.code === "Space") {
      ev.preventDefault();
      setBeam(false);
    }
  });

  canvas.addEventListener("mousemove", (ev) => {
    const rect = canvas.getBoundingClientRect();
    const p = normalizePointer(rect, ev.clientX, ev.clientY);
    loop.setPointer(p.x, p.y);
  });
  canvas.addEventListener("mousedown", () => setBeam(true));
  canvas.addEventListener("mouseup", () => setBeam(false));

  function sx(x: number): number {
    return (x / SCREEN_W) * canvas.width;
  }
  function sy(y: number): number {
    return (y / SCREEN_H) * canvas.height;
  }

  function drawRegionGrid(): void {
    if (ctx === null) return;
    ctx.strokeStyle = "rgba(255,255,255,0.12)";
    ctx.lineWidth = 1;
    ctx.setLineDash([6, 6]);
    // Horizontal band boundaries at one and two thirds of the height.
    for (const fy of [1 / 3, 2 / 3]) {
      ctx.beginPath();
      ctx.moveTo(0, fy * canvas.height);
      ctx.lineTo(canvas.width, fy * canvas.height);
      ctx.stroke();
    }
    // Upper band splits in half; lower band splits in thirds.
    ctx.beginPath();
    ctx.moveTo(canvas.width / 2, 0);
    ctx.lineTo(canvas.width / 2, canvas.height / 3);
    ctx.stroke();
    for (const fx of [1 / 3, 2 / 3]) {
      ctx.beginPath();
      ctx.moveTo(fx * canvas.width, (2 / 3) * canvas.height);
      ctx.lineTo(fx * canvas.width, canvas.height);
      ctx.stroke();
    }
    ctx.setLineDash([]);
  }

  function drawCalibration(): void {
    if (ctx === null || !state.calibration.active) return;
    const c = state.calibration;
    CALIBRATION_TARGETS.forEach(([fx, fy], i) => {
      const x = fx * (canvas.width - 1);
      const y = fy * (canvas.height - 1);
      ctx.beginPath();
      ctx.arc(x, y, 14, 0, 2 * Math.PI);
      ctx.strokeStyle = i < c.corner ? "#3fa34d" : i === c.corner ? "#ffd166" : "#555";
      ctx.lineWidth = i === c.corner ? 3 : 1.5;
      ctx.stroke();
    });
    if (c.corner < 4) {
      const frac = c.samples / c.samplesPerCorner;
      ctx.fillStyle = "rgba(255,209,102,0.9)";
      ctx.fillRect(canvas.width / 2 - 80, canvas.height - 24, 160 * frac, 8);
      ctx.strokeStyle = "#ffd166";
      ctx.strokeRect(canvas.width / 2 - 80, canvas.height - 24, 160, 8);
      ctx.fillStyle = "#ffd166";
      ctx.font = "13px system-ui, sans-serif";
      ctx.textAlign = "center";
      ctx.fillText(
        `Hold the beam on the ${CORNER_NAMES[c.corner] ?? ""} corner (${c.samples}/${c.samplesPerCorner})`,
        canvas.width / 2,
        canvas.height - 32,
      );
    }
  }

  function drawMarksAndDrag(): void {
    if (ctx === null) return;
    ctx.strokeStyle = "#7fd1ff";
    ctx.lineWidth = 2;
    for (const mark of state.marks) {
      ctx.beginPath();
      mark.points.forEach(([x, y], i) => {
        if (i === 0) ctx.moveTo(sx(x), sy(y));
        else ctx.lineTo(sx(x), sy(y));
      });
      ctx.stroke();
    }
    if (state.dragPath !== null && state.dragPath.length > 0) {
      ctx.strokeStyle = "#ffd166";
      ctx.beginPath();
      state.dragPath.forEach(([x, y], i) => {
        if (i === 0) ctx.moveTo(sx(x), sy(y));
        else ctx.lineTo(sx(x), sy(y));
      });
      ctx.stroke();
    }
  }

  // The reducer is pure, so flash timing is tracked here: a new lastClick
  // object restarts the fade clock.
  let flashFor: UiState["lastClick"] = null;
  let flashUntil = 0;

  function drawCursorAndFlash(): void {
    if (ctx === null) return;
    if (state.lastClick !== flashFor) {
      flashFor = state.lastClick;
      flashUntil = Date.now() + CLICK_FLASH_MS;
    }
    if (state.lastClick !== null && Date.now() < flashUntil) {
      ctx.beginPath();
      ctx.arc(sx(state.lastClick.x), sy(state.lastClick.y), 16, 0, 2 * Math.PI);
      ctx.strokeStyle = state.lastClick.kind === "RightClick" ? "#ef6461" : "#3fa34d";
      ctx.lineWidth = 3;
      ctx.stroke();
    }
    if (state.cursor !== null && state.spotDetected) {
      ctx.beginPath();
      ctx.arc(sx(state.cursor[0]), sy(state.cursor[1]), 6, 0, 2 * Math.PI);
      ctx.fillStyle = state.mode === "Normal" ? "#ff5252" : "#ffd166";
      ctx.fill();
    }
  }

  function drawInfoBox(): void {
    if (ctx === null || state.infoText === "") return;
    ctx.font = "14px system-ui, sans-serif";
    const metrics = ctx.measureText(state.infoText);
    const pad = 8;
    const bw = metrics.width + 2 * pad;
    const bh = 28;
    const bx = state.infoCorner === "top-left" ? 12 : canvas.width - bw - 12;
    ctx.fillStyle = "rgba(20,20,28,0.85)";
    ctx.fillRect(bx, 12, bw, bh);
    ctx.strokeStyle = "#666";
    ctx.strokeRect(bx, 12, bw, bh);
    ctx.fillStyle = "#eee";
    ctx.textAlign = "left";
    ctx.fillText(state.infoText, bx + pad, 12 + bh / 2 + 5);
  }

  function render(): void {
    if (ctx === null) return;
    ctx.fillStyle = "#101018";
    ctx.fillRect(0, 0, canvas.width, canvas.height);
    drawRegionGrid();

    ctx.fillStyle = "rgba(255,255,255,0.85)";
    ctx.font = "64px system-ui, sans-serif";
    ctx.textAlign = "center";
    ctx.fillText(`Slide ${state.slide}`, canvas.width / 2, canvas.height / 2);

    drawMarksAndDrag();
    drawCalibration();
    drawCursorAndFlash();
    drawInfoBox();

    const bits = [
      `connection: ${state.connection}`,
      `mode: ${state.mode}`,
      `region: ${state.region ?? "-"}`,
      `beam: ${state.beamOn ? "on" : "off"}`,
      state.calibrated ? "calibrated" : "uncalibrated",
    ];
    if (state.lastError !== null) {
      bits.push(`error: ${state.lastError}`);
    }
    statusLine.textContent = bits.join("  |  ");
    connectBtn.textContent = state.connection === "open" ? "Disconnect" : "Connect";
    beamBtn.textContent = state.beamOn ? "Beam off (Space)" : "Beam on (Space)";

    tickerList.replaceChildren(
      ...state.ticker.slice(-TICKER_SHOWN).map((entry) => {
        const li = document.createElement("li");
        li.textContent = `f${entry.frame}  ${entry.kind}`;
        return li;
      }),
    );
  }

  // Repaint on a timer too, so click flashes fade without an update arriving.
  setInterval(render, 250);
  render();
}

main();
