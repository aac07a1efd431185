// Console view model: a pure state holder fed by stream frames and command
// outcomes. Rendering reads it; nothing in here touches the DOM, and no
// simulation or parsing logic runs client-side.

import { CommandAccepted, CommandRejected, WorldSnapshot } from "./types";

export type ConnectionStatus = "connecting" | "connected" | "reconnecting";

export interface CommandRecord {
  text: string;
  ok: boolean;
  task?: CommandAccepted["task"];
  error?: string;
  detail?: string;
  at: number; // ms epoch, display only
}

export class ConsoleModel {
  latest: WorldSnapshot | null = null;
  status: ConnectionStatus = "connecting";
  framesReceived = 0;
  framesDropped = 0;
  history: CommandRecord[] = [];

  applyFrame(data: string): boolean {
    let snapshot: WorldSnapshot;
    try {
      snapshot = JSON.parse(data) as WorldSnapshot;
      if (typeof snapshot.tick !== "number" || !snapshot.executor) {
        throw new Error("not a snapshot");
      }
    } catch {
      this.framesDropped += 1;
      return false;
    }
    this.latest = snapshot;
    this.framesReceived += 1;
    return true;
  }

  setStatus(status: ConnectionStatus): void {
    this.status = status;
  }

  recordAccepted(text: string, body: CommandAccepted, now = Date.now()): CommandRecord {
    const rec: CommandRecord = { text, ok: true, task: body.task, at: now };
    this.history.unshift(rec);
    return rec;
  }

  recordRejected(text: string, body: CommandRejected, now = Date.now()): CommandRecord {
    const rec: CommandRecord = {
      text,
      ok: false,
      error: body.error,
      detail: body.detail,
      at: now,
    };
    this.history.unshift(rec);
    return rec;
  }
}
