import { describe, expect, it } from "vitest";

import type { Envelope, TrafficFrame } from "../src/protocol.js";
import { ViewModel } from "../src/viewmodel.js";

function trafficFrame(over: Partial<TrafficFrame> = {}): TrafficFrame {
  return {
    phase: "live", scenario: "traffic", tick: 10, elapsed: 1.0,
    roads: [{ id: "A>B", from: "A", to: "B", occupancy: 10, capacity: 60,
              toll: 0.5, status: "none" }],
    cars: [], transits: 0, ...over,
  };
}

function frameMsg(seq: number, frame: TrafficFrame): Envelope<TrafficFrame> {
  return { type: "frame", session: "s1", seq, payload: frame };
}

function connectedVm(sent: Envelope<unknown>[] = []): ViewModel {
  const vm = new ViewModel((msg) => {
    sent.push(msg);
    return true;
  });
  vm.onConnected();
  vm.session = "s1";
  return vm;
}

describe("frame intake", () => {
  it("applies frames in sequence order", () => {
    const vm = connectedVm();
    expect(vm.apply(frameMsg(1, trafficFrame({ tick: 10 })))).toBe(true);
    expect(vm.apply(frameMsg(2, trafficFrame({ tick: 20 })))).toBe(true);
    expect(vm.frame?.tick).toBe(20);
  });

  it("drops stale frames on seq regression", () => {
    const vm = connectedVm();
    vm.apply(frameMsg(5, trafficFrame({ tick: 50 })));
    expect(vm.apply(frameMsg(4, trafficFrame({ tick: 40 })))).toBe(false);
    expect(vm.frame?.tick).toBe(50);
    expect(vm.droppedFrames).toBe(1);
  });
});

describe("budget display", () => {
  it("shows nothing before the server confirms a value", () => {
    const vm = connectedVm();
    vm.apply(frameMsg(1, trafficFrame()));   // no budget field
    expect(vm.budget).toBeNull();
  });

  it("never computes budget client-side: a click leaves it untouched", () => {
    const vm = connectedVm();
    vm.apply(frameMsg(1, trafficFrame({ budget: 0.30 })));
    vm.clickToCommand("toll-change", "A>B", 0.01);
    expect(vm.budget).toBe(0.30);            // optimistic updates forbidden
  });

  it("takes confirmed values from frames and command results", () => {
    const vm = connectedVm();
    vm.apply(frameMsg(1, trafficFrame({ budget: 0.30 })));
    vm.apply({ type: "command_result", session: "s1", seq: 2, payload: {
      client_tag: "ui-1", accepted: true, reason: "", balance: 0.29 } });
    expect(vm.budget).toBe(0.29);
  });
});

describe("clicks", () => {
  it("burst clicking produces one command per click with unique tags", () => {
    const sent: Envelope<unknown>[] = [];
    const vm = connectedVm(sent);
    const tags = new Set<string>();
    for (let i = 0; i < 20; i++) {
      const tag = vm.clickToCommand("toll-change", "B>C", 0.01);
      expect(tag).not.toBeNull();
      tags.add(tag!);
    }
    expect(sent.length).toBe(20);
    expect(tags.size).toBe(20);
    expect(vm.pending.size).toBe(20);
  });

  it("rejections surface as toasts and clear the pending entry", () => {
    const vm = connectedVm();
    const tag = vm.clickToCommand("toll-change", "B>C", 0.01)!;
    vm.apply({ type: "command_result", session: "s1", seq: 1, payload: {
      client_tag: tag, accepted: false, reason: "budget" } });
    expect(vm.pending.size).toBe(0);
    expect(vm.toasts.at(-1)?.reason).toBe("budget");
  });

  it("queues up to a cap while disconnected, then refuses visibly", () => {
    const sent: Envelope<unknown>[] = [];
    const vm = new ViewModel((msg) => {
      sent.push(msg);
      return true;
    });
    vm.session = "s1";                        // never connected
    for (let i = 0; i < 40; i++) vm.clickToCommand("toll-change", "A>B", 0.01);
    expect(sent.length).toBe(0);
    expect(vm.offlineQueue.length).toBe(32);
    expect(vm.refused).toBe(8);
    expect(vm.toasts.length).toBe(8);
    vm.onConnected();                         // flush on reconnect
    expect(sent.length).toBe(32);
    expect(vm.offlineQueue.length).toBe(0);
  });
});

describe("forecast highlights", () => {
  it("mirrors the latest frame statuses exactly", () => {
    const vm = connectedVm();
    vm.apply(frameMsg(1, trafficFrame({
      roads: [
        { id: "A>B", from: "A", to: "B", occupancy: 50, capacity: 60,
          toll: 0.5, status: "yellow" },
        { id: "B>A", from: "B", to: "A", occupancy: 70, capacity: 60,
          toll: 0.5, status: "red" },
      ],
    })));
    expect(vm.highlight("A>B")).toBe("yellow");
    expect(vm.highlight("B>A")).toBe("red");
    expect(vm.highlight("nope")).toBe("none");
  });
});

describe("game over", () => {
  it("records the final score and flips the phase", () => {
    const vm = connectedVm();
    vm.apply({ type: "game_over", session: "s1", seq: 9, payload: {
      final: { throughput_pct: 41.5 }, score: 41.5 } });
    expect(vm.phase).toBe("finished");
    expect(vm.gameOver?.score).toBe(41.5);
  });
});
