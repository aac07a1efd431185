// Thin fetch wrappers around the service API.

import { CommandAccepted, CommandRejected, WorldInfo, WorldSnapshot } from "./types";

export type CommandOutcome =
  | { kind: "accepted"; body: CommandAccepted }
  | { kind: "rejected"; body: CommandRejected }
  | { kind: "network"; message: string };

export async function sendCommand(base: string, text: string): Promise<CommandOutcome> {
  let resp: Response;
  try {
    resp = await fetch(`${base}/api/commands`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ text, client_tag: "console" }),
    });
  } catch (err) {
    return { kind: "network", message: String(err) };
  }
  if (resp.status === 202) {
    return { kind: "accepted", body: (await resp.json()) as CommandAccepted };
  }
  try {
    const body = (await resp.json()) as CommandRejected;
    return { kind: "rejected", body };
  } catch {
    return { kind: "rejected", body: { error: `HTTP ${resp.status}`, detail: "" } };
  }
}

export async function fetchWorld(base: string): Promise<WorldInfo> {
  const resp = await fetch(`${base}/api/landmarks`);
  if (!resp.ok) throw new Error(`landmarks request failed: ${resp.status}`);
  return (await resp.json()) as WorldInfo;
}

export async function fetchState(base: string): Promise<WorldSnapshot> {
  const resp = await fetch(`${base}/api/state`);
  if (!resp.ok) throw new Error(`state request failed: ${resp.status}`);
  return (await resp.json()) as WorldSnapshot;
}
