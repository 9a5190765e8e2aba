/**
 * Console state. Every number displayed comes from a server frame or a
 * server command result; nothing is simulated or extrapolated client-side,
 * and budget/toll/price values render only after the server confirms them.
 */

import type {
  CommandPayload, CommandResult, Envelope, Frame, GameOver,
} from "./protocol.js";

export interface PendingCommand {
  tag: string;
  payload: CommandPayload;
  sentAt: number;
}

export interface Toast {
  tag: string | null;
  reason: string;
}

export type Sender = (msg: Envelope<unknown>) => boolean;

const OFFLINE_QUEUE_CAP = 32;

export class ViewModel {
  session: string | null = null;
  phase = "connecting";
  frame: Frame | null = null;
  lastSeq = -1;
  pending = new Map<string, PendingCommand>();
  toasts: Toast[] = [];
  budget: number | null = null;        // server-confirmed only
  quotaUsed: number | null = null;
  quotaMax: number | null = null;
  gameOver: GameOver | null = null;
  connected = false;
  offlineQueue: Envelope<CommandPayload>[] = [];
  refused = 0;                          // clicks dropped while offline
  droppedFrames = 0;                    // seq regressions
  private tagCounter = 0;
  private send: Sender;

  constructor(send: Sender) {
    this.send = send;
  }

  /** Highlight for a road: mirrors the latest frame's forecast status. */
  highlight(roadId: string): "none" | "yellow" | "red" {
    if (!this.frame || this.frame.scenario !== "traffic") return "none";
    const road = this.frame.roads.find((r) => r.id === roadId);
    return road ? road.status : "none";
  }

  nextTag(): string {
    this.tagCounter += 1;
    return `ui-${this.tagCounter}`;
  }

  /** One click, one command, one unique tag. */
  clickToCommand(kind: CommandPayload["kind"], target: string | number,
                 delta: number): string | null {
    const tag = this.nextTag();
    const payload: CommandPayload = { kind, target, delta, client_tag: tag };
    const msg: Envelope<CommandPayload> = {
      type: "command", session: this.session, seq: 0, payload,
    };
    if (!this.connected) {
      if (this.offlineQueue.length >= OFFLINE_QUEUE_CAP) {
        this.refused += 1;
        this.toasts.push({ tag, reason: "offline: click dropped" });
        return null;
      }
      this.offlineQueue.push(msg);
      this.pending.set(tag, { tag, payload, sentAt: Date.now() });
      return tag;
    }
    this.send(msg);
    this.pending.set(tag, { tag, payload, sentAt: Date.now() });
    return tag;
  }

  onConnected(): void {
    this.connected = true;
    for (const msg of this.offlineQueue.splice(0)) this.send(msg);
  }

  onDisconnected(): void {
    this.connected = false;
  }

  /** Route one server envelope into the state. Returns true if it changed. */
  apply(msg: Envelope<unknown>): boolean {
    switch (msg.type) {
      case "hello":
        return true;
      case "opened":
      case "attached": {
        this.session = msg.session;
        const payload = msg.payload as { phase: string; frame: Frame };
        this.phase = payload.phase;
        this.frame = payload.frame;
        this.lastSeq = msg.seq;
        this.takeConfirmed(payload.frame);
        return true;
      }
      case "started":
        this.phase = (msg.payload as { phase: string }).phase;
        return true;
      case "frame": {
        if (msg.seq <= this.lastSeq) {
          this.droppedFrames += 1;     // stale: seq regression
          return false;
        }
        this.lastSeq = msg.seq;
        const frame = msg.payload as Frame;
        this.frame = frame;
        this.phase = frame.phase;
        this.takeConfirmed(frame);
        return true;
      }
      case "command_result": {
        const result = msg.payload as CommandResult;
        if (result.client_tag) this.pending.delete(result.client_tag);
        if (!result.accepted) {
          this.toasts.push({ tag: result.client_tag, reason: result.reason });
        }
        if (typeof result.balance === "number") this.budget = result.balance;
        if (typeof result.quota_used === "number") this.quotaUsed = result.quota_used;
        return true;
      }
      case "game_over":
        this.gameOver = msg.payload as GameOver;
        this.phase = "finished";
        return true;
      case "error":
        this.toasts.push({
          tag: null,
          reason: (msg.payload as { message: string }).message,
        });
        return true;
      default:
        return false;
    }
  }

  private takeConfirmed(frame: Frame): void {
    if (frame.scenario === "traffic") {
      if (typeof frame.budget === "number") this.budget = frame.budget;
    } else {
      if (typeof frame.quota_used === "number") this.quotaUsed = frame.quota_used;
      if (typeof frame.quota_max === "number") this.quotaMax = frame.quota_max;
    }
  }
}
