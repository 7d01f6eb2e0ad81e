import { drawChart, pathLossSeries, rewardSeries, telemetryToCsv } from "./chart";
import { Connection } from "./connection";
import { ACTION_LABELS } from "./protocol";
import { drawChamber, drawPlaceholder } from "./render";
import { ViewState } from "./store";
import { wirePanel } from "./panel";

const store = new ViewState();
const conn = new Connection(store);

const chamberCanvas = document.getElementById("chamber") as HTMLCanvasElement;
const plCanvas = document.getElementById("chart-pathloss") as HTMLCanvasElement;
const rwCanvas = document.getElementById("chart-reward") as HTMLCanvasElement;

const statusEl = document.getElementById("status")!;
const losEl = document.getElementById("los-badge")!;
const tickEl = document.getElementById("tick")!;
const modeEl = document.getElementById("mode-label")!;
const dropEl = document.getElementById("drops")!;
const pendingEl = document.getElementById("pending")!;
const errorEl = document.getElementById("last-error")!;
const actionEl = document.getElementById("last-action")!;
const epsilonEl = document.getElementById("epsilon")!;

const endpointInput = document.getElementById("endpoint") as HTMLInputElement;
const fromQuery = new URLSearchParams(window.location.search).get("server");
endpointInput.value = fromQuery ?? "ws://127.0.0.1:8765";

(document.getElementById("btn-connect") as HTMLButtonElement).onclick = () => {
  conn.open(endpointInput.value);
};
(document.getElementById("btn-disconnect") as HTMLButtonElement).onclick = () => conn.close();

(document.getElementById("btn-export") as HTMLButtonElement).onclick = () => {
  const blob = new Blob([telemetryToCsv(store.telemetry)], { type: "text/csv" });
  const a = document.createElement("a");
  a.href = URL.createObjectURL(blob);
  a.download = "telemetry.csv";
  a.click();
  URL.revokeObjectURL(a.href);
};

wirePanel(document, conn, store);

const chartStyle = {
  line: "#4da3ff",
  shade: "rgba(255, 93, 93, 0.18)",
  axis: "#39424e",
  text: "#c6cdd5",
};

function renderStatus(): void {
  statusEl.textContent = store.status;
  statusEl.className = `pill ${store.status}`;
  const snap = store.latest;
  if (snap) {
    losEl.textContent = snap.los === 0 ? "LoS" : "NLoS";
    losEl.className = `pill ${snap.los === 0 ? "los" : "nlos"}`;
    tickEl.textContent = `tick ${snap.tick}`;
    modeEl.textContent = snap.mode;
    actionEl.textContent = snap.last_action === null ? "-" : ACTION_LABELS[snap.last_action] ?? "?";
    epsilonEl.textContent = snap.epsilon === null ? "-" : snap.epsilon.toFixed(3);
  }
  dropEl.textContent = `${store.droppedTotal} dropped`;
  pendingEl.textContent = `${store.pending.size} pending`;
  errorEl.textContent = store.lastError ? `error: ${store.lastError.reason}` : "";
}

function frame(): void {
  const ctx = chamberCanvas.getContext("2d")!;
  const snap = store.latest;
  if (snap && store.hello) {
    const chamber = store.hello.chamber;
    drawChamber(ctx, snap, chamber.width, chamber.depth, chamberCanvas.width, chamberCanvas.height, chamber.gnb_track_y);
  } else {
    drawPlaceholder(ctx, chamberCanvas.width, chamberCanvas.height, store.status);
  }

  const plCtx = plCanvas.getContext("2d")!;
  drawChart(plCtx, pathLossSeries(store.telemetry), plCanvas.width, plCanvas.height, "path loss (dB)", chartStyle);
  const rwCtx = rwCanvas.getContext("2d")!;
  const gain = store.hello?.reward_gain ?? 1.0;
  drawChart(rwCtx, rewardSeries(store.telemetry, gain), rwCanvas.width, rwCanvas.height, "reward", chartStyle);

  renderStatus();
  requestAnimationFrame(frame);
}

requestAnimationFrame(frame);

if (fromQuery) {
  conn.open(fromQuery);
}
