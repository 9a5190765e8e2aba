// @vitest-environment jsdom
import { describe, expect, it } from "vitest";

import type { Envelope, RoadView, TrafficFrame, WaterFrame } from "../src/protocol.js";
import { STATUS_CLASS, bindControls, renderApp } from "../src/render.js";
import { ViewModel } from "../src/viewmodel.js";

const STATUSES = ["none", "yellow", "red"] as const;

function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

function randomTrafficFrame(rand: () => number, tick: number): TrafficFrame {
  const nodes = ["A", "B", "C", "D"];
  const roads: RoadView[] = [];
  for (const from of nodes) {
    for (const to of nodes) {
      if (from === to || rand() < 0.4) continue;
      roads.push({
        id: `${from}>${to}`, from, to,
        occupancy: Math.floor(rand() * 120),
        capacity: 40 + Math.floor(rand() * 60),
        toll: Math.round(rand() * 99) / 100,
        status: STATUSES[Math.floor(rand() * 3)],
      });
    }
  }
  if (roads.length === 0) {
    roads.push({ id: "A>B", from: "A", to: "B", occupancy: 1, capacity: 10,
                 toll: 0.5, status: "red" });
  }
  const cars = Array.from({ length: 30 }, (_, i) => ({
    id: i, road: roads[Math.floor(rand() * roads.length)].id,
    fraction: rand(),
  }));
  return { phase: "live", scenario: "traffic", tick, elapsed: tick / 10,
           roads, cars, transits: Math.floor(rand() * 500) };
}

function vmWithRoot(): { vm: ViewModel; root: HTMLElement } {
  const root = document.createElement("div");
  document.body.appendChild(root);
  const vm = new ViewModel(() => true);
  vm.onConnected();
  vm.session = "s1";
  return { vm, root };
}

describe("forecast styling", () => {
  it("edge classes match the frame's statuses on 100 random frames", () => {
    const rand = mulberry32(20260810);
    const { vm, root } = vmWithRoot();
    for (let i = 0; i < 100; i++) {
      const frame = randomTrafficFrame(rand, i + 1);
      vm.apply({ type: "frame", session: "s1", seq: i + 1, payload: frame });
      renderApp(vm, root);
      for (const road of frame.roads) {
        const line = root.querySelector(`[data-road="${road.id}"]`)!;
        expect(line.getAttribute("data-status")).toBe(road.status);
        expect(line.getAttribute("class")).toContain(STATUS_CLASS[road.status]);
      }
    }
  });
});

describe("traffic rendering", () => {
  it("shows confirmed budget, transit count and car dots", () => {
    const { vm, root } = vmWithRoot();
    const frame = randomTrafficFrame(mulberry32(7), 5);
    frame.budget = 10.80;
    frame.transits = 321;
    vm.apply({ type: "frame", session: "s1", seq: 1, payload: frame });
    renderApp(vm, root);
    expect(root.querySelector('[data-role="budget"]')!.textContent)
      .toContain("10.80");
    expect(root.querySelector('[data-role="transits"]')!.textContent)
      .toContain("321");
    const dots = root.querySelectorAll("circle.car").length;
    expect(dots).toBe(frame.cars.filter((c) => c.road).length);
  });

  it("renders no highlights when no forecast ran (study-1 mode)", () => {
    const { vm, root } = vmWithRoot();
    const frame = randomTrafficFrame(mulberry32(9), 2);
    for (const road of frame.roads) road.status = "none";
    vm.apply({ type: "frame", session: "s1", seq: 1, payload: frame });
    renderApp(vm, root);
    expect(root.querySelectorAll(".road-red, .road-yellow").length).toBe(0);
  });
});

describe("water rendering", () => {
  it("shows tank, six price tiles, shed counter and happiness", () => {
    const { vm, root } = vmWithRoot();
    const frame: WaterFrame = {
      phase: "live", scenario: "water", tick: 13, elapsed: 13,
      day: 3, period: 2, level: 24,
      prices: [1.0, 1.1, 0.9, 1.0, 1.0, 2.0],
      consumption: [5, 0, 0, 0, 0, 0], consumed_today: 5,
      shed_count: 17, shed_value: 88.5,
      happiness: [1, 2, 3, 4, 5, 6, 7, 8], aggregate_utility: 36,
      quota_used: 2, quota_max: 3,
    };
    vm.apply({ type: "frame", session: "s1", seq: 1, payload: frame });
    renderApp(vm, root);
    expect(root.querySelectorAll(".tile").length).toBe(6);
    expect(root.querySelector('[data-role="shed"]')!.textContent)
      .toContain("17");
    expect(root.querySelector('[data-role="quota"]')!.textContent)
      .toContain("2/3");
    expect(root.querySelectorAll(".tenant").length).toBe(8);
  });
});

describe("click wiring", () => {
  it("a rendered + button emits exactly one command", () => {
    const sent: Envelope<unknown>[] = [];
    const root = document.createElement("div");
    document.body.appendChild(root);
    const vm = new ViewModel((msg) => {
      sent.push(msg);
      return true;
    });
    vm.onConnected();
    vm.session = "s1";
    bindControls(vm, root);
    vm.apply({ type: "frame", session: "s1", seq: 1,
               payload: randomTrafficFrame(mulberry32(3), 1) });
    renderApp(vm, root);
    const plus = root.querySelector('[data-action="toll"]') as HTMLElement;
    plus.click();
    expect(sent.length).toBe(1);
    const payload = sent[0].payload as { kind: string; delta: number };
    expect(payload.kind).toBe("toll-change");
    expect(payload.delta).toBe(0.01);
  });
});

describe("score panel", () => {
  it("appears on game over with the final score", () => {
    const { vm, root } = vmWithRoot();
    vm.apply({ type: "game_over", session: "s1", seq: 2, payload: {
      final: { throughput_pct: 52.25 }, score: 52.25 } });
    renderApp(vm, root);
    expect(root.querySelector('[data-role="score"]')!.textContent)
      .toContain("52.3% of optimal");
  });
});
