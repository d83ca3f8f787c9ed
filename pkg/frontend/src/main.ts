// DOM wiring: one store, one link, one render loop.

import { CockpitStore } from "./cockpit.js";
import { CockpitLink } from "./connection.js";
import { RideControls } from "./input.js";
import { drawGauges, drawMap } from "./map.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) throw new Error(`missing #${id}`);
  return node as T;
}

function main(): void {
  const store = new CockpitStore();
  const controls = new RideControls();

  const statusBanner = el<HTMLDivElement>("status");
  const linkStats = el<HTMLDivElement>("link");
  const inputReadout = el<HTMLDivElement>("inputs");
  const mapCanvas = el<HTMLCanvasElement>("map");
  const gaugeCanvas = el<HTMLCanvasElement>("gauges");
  const dial = el<HTMLInputElement>("handlebar");

  const wsUrl = `ws://${location.host}/ws`;
  const link = new CockpitLink(wsUrl, {
    onMessage: (raw) => store.ingest(raw, performance.now()),
    onStatus: (status) => store.setStatus(status),
  });
  link.connect();

  // Initial snapshot over plain HTTP while the socket comes up.
  fetch("/state")
    .then((r) => r.text())
    .then((text) => {
      statusBanner.textContent = text.includes("running") ? "session running" : "session idle";
    })
    .catch(() => undefined);

  const sendCurrent = () => {
    link.send(JSON.stringify(controls.message()));
  };

  window.addEventListener("keydown", (event) => {
    if (event.repeat && event.key !== "ArrowLeft" && event.key !== "ArrowRight") return;
    const msg = controls.handleKey(event.key);
    if (msg !== null) {
      event.preventDefault();
      dial.value = String(controls.handlebarDeg);
      link.send(JSON.stringify(msg));
    }
  });

  dial.addEventListener("input", () => {
    controls.setHandlebar(Number(dial.value));
    sendCurrent();
  });

  el<HTMLButtonElement>("center").addEventListener("click", () => {
    const msg = controls.toggleReleaseToCenter();
    dial.value = String(controls.handlebarDeg);
    link.send(JSON.stringify(msg));
  });

  const mapCtx = mapCanvas.getContext("2d");
  const gaugeCtx = gaugeCanvas.getContext("2d");

  function render(): void {
    statusBanner.textContent = store.status;
    statusBanner.className = `status ${store.status}`;
    const counters = store.link;
    linkStats.textContent = counters
      ? `rx ${counters.received}  applied ${counters.applied}  stale ${counters.stale_dropped}  ` +
        `corrupt ${counters.corrupt_dropped}  malformed ${store.malformedCount}`
      : "no link data yet";
    const writer = store.serverInput?.writer || "-";
    inputReadout.textContent =
      `rps ${controls.rpsTarget.toFixed(2)}  handlebar ${controls.handlebarDeg.toFixed(1)}°  ` +
      `writer ${writer}${controls.lastClamped ? "  [clamped]" : ""}`;
    if (mapCtx !== null) drawMap(mapCtx, store.ring, mapCanvas.width, mapCanvas.height);
    if (gaugeCtx !== null) drawGauges(gaugeCtx, store.command, gaugeCanvas.width);
    requestAnimationFrame(render);
  }
  requestAnimationFrame(render);
}

window.addEventListener("load", main);
