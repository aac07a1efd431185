import { fetchState, fetchWorld, sendCommand } from "./api";
import { CommandRecord, ConsoleModel } from "./model";
import { render } from "./render";
import { dictateOnce, speechAvailable } from "./speech";
import { EventSourceLike, StreamSubscription } from "./stream";
import { fitTransform } from "./transform";
import { WorldInfo } from "./types";

const base = "";
const model = new ConsoleModel();

const canvas = document.getElementById("map") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const statusEl = document.getElementById("status")!;
const stateBadge = document.getElementById("state-badge")!;
const countersEl = document.getElementById("counters")!;
const queueEl = document.getElementById("queue")!;
const historyEl = document.getElementById("history")!;
const form = document.getElementById("command-form") as HTMLFormElement;
const input = document.getElementById("command-input") as HTMLInputElement;
const micButton = document.getElementById("mic") as HTMLButtonElement;

let world: WorldInfo | null = null;

function redraw(): void {
  if (!world) return;
  const t = fitTransform(world.map, canvas.width, canvas.height);
  render(ctx, world, model.latest, t);
  const ex = model.latest?.executor;
  stateBadge.textContent = ex ? ex.state : "-";
  stateBadge.className = ex && ex.state !== "Idle" ? "badge active" : "badge";
  if (model.latest) {
    countersEl.textContent =
      `t=${model.latest.sim_time.toFixed(1)}s  ` +
      `collisions=${model.latest.collisions_so_far}  ` +
      `stops=${model.latest.emergency_stops_so_far}  ` +
      `carrying=${ex?.carried_item ?? "nothing"}`;
    queueEl.textContent = ex && ex.queue.length
      ? "queued: " + ex.queue.map((t) => t.item).join(", ")
      : "";
  }
}

function renderStatus(): void {
  statusEl.textContent = model.status;
  statusEl.className = `status ${model.status}`;
}

function renderHistory(): void {
  historyEl.replaceChildren(
    ...model.history.slice(0, 12).map((rec) => historyEntry(rec)),
  );
}

function historyEntry(rec: CommandRecord): HTMLElement {
  const li = document.createElement("li");
  const text = document.createElement("div");
  text.className = "cmd-text";
  text.textContent = rec.text;
  li.appendChild(text);
  const line = document.createElement("div");
  if (rec.ok && rec.task) {
    line.className = "chips";
    for (const [label, value] of [
      ["pickup", rec.task.pickup.name],
      ["item", rec.task.item],
      ["delivery", rec.task.delivery.name],
    ]) {
      const chip = document.createElement("span");
      chip.className = `chip ${label}`;
      chip.textContent = value;
      line.appendChild(chip);
    }
  } else {
    line.className = "error-line";
    line.textContent = `${rec.error}${rec.detail ? ": " + rec.detail : ""}`;
  }
  li.appendChild(line);
  return li;
}

form.addEventListener("submit", async (ev) => {
  ev.preventDefault();
  const text = input.value.trim();
  if (!text) return;
  input.value = "";
  const outcome = await sendCommand(base, text);
  if (outcome.kind === "accepted") {
    model.recordAccepted(text, outcome.body);
  } else if (outcome.kind === "rejected") {
    model.recordRejected(text, outcome.body);
  } else {
    model.recordRejected(text, { error: "NetworkError", detail: outcome.message });
  }
  renderHistory();
});

if (speechAvailable()) {
  micButton.hidden = false;
  micButton.addEventListener("click", () => {
    micButton.disabled = true;
    dictateOnce(
      (text) => {
        input.value = text;
      },
      () => {
        micButton.disabled = false;
        input.focus();
      },
    );
  });
}

const stream = new StreamSubscription(
  `${base}/api/stream`,
  {
    onFrame: (data) => {
      if (model.applyFrame(data)) redraw();
    },
    onStatus: (status) => {
      model.setStatus(status);
      renderStatus();
    },
  },
  (url) => new EventSource(url) as unknown as EventSourceLike,
);

async function boot(): Promise<void> {
  renderStatus();
  world = await fetchWorld(base);
  // seed the display from /api/state so a refreshed page shows the world
  // before the first stream frame arrives
  try {
    const state = await fetchState(base);
    model.applyFrame(JSON.stringify(state));
  } catch {
    // stream will fill it in
  }
  redraw();
  stream.start();
}

boot().catch((err) => {
  statusEl.textContent = `failed to load world: ${err}`;
});
