/** DOM rendering. Rebuilt from the latest frame; no state of its own. */

import type { RoadView, TrafficFrame, WaterFrame } from "./protocol.js";
import type { ViewModel } from "./viewmodel.js";

const SVG_NS = "http://www.w3.org/2000/svg";

/** Fixed coordinates: operators build spatial memory, so no force layout. */
const DEFAULT_LAYOUT: Record<string, [number, number]> = {
  A: [70, 200], B: [240, 60], C: [240, 340], D: [410, 200],
};

export function layoutFor(nodes: string[]): Record<string, [number, number]> {
  if (nodes.every((n) => n in DEFAULT_LAYOUT)) return DEFAULT_LAYOUT;
  const coords: Record<string, [number, number]> = {};
  nodes.forEach((node, i) => {
    const angle = (2 * Math.PI * i) / nodes.length - Math.PI / 2;
    coords[node] = [240 + 170 * Math.cos(angle), 200 + 150 * Math.sin(angle)];
  });
  return coords;
}

export const STATUS_CLASS = {
  none: "road-none",
  yellow: "road-yellow",
  red: "road-red",
} as const;

function el(tag: string, attrs: Record<string, string> = {},
            text?: string): HTMLElement {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  if (text !== undefined) node.textContent = text;
  return node;
}

function svgEl(tag: string, attrs: Record<string, string> = {},
               text?: string): SVGElement {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  if (text !== undefined) node.textContent = text;
  return node;
}

export function renderApp(vm: ViewModel, root: HTMLElement): void {
  root.textContent = "";
  root.appendChild(renderHeader(vm));
  if (vm.gameOver) root.appendChild(renderScore(vm));
  if (vm.frame?.scenario === "traffic") {
    root.appendChild(renderTraffic(vm, vm.frame));
  } else if (vm.frame?.scenario === "water") {
    root.appendChild(renderWater(vm, vm.frame));
  }
  root.appendChild(renderToasts(vm));
}

function renderHeader(vm: ViewModel): HTMLElement {
  const header = el("div", { class: "header" });
  header.appendChild(el("span", { class: "phase", "data-role": "phase" },
                        `phase: ${vm.phase}`));
  if (vm.frame) {
    header.appendChild(el("span", { class: "clock" },
                          ` t=${vm.frame.elapsed.toFixed(1)}`));
  }
  if (!vm.connected) {
    header.appendChild(el("span", { class: "offline" }, " DISCONNECTED"));
  }
  return header;
}

function renderScore(vm: ViewModel): HTMLElement {
  const over = vm.gameOver!;
  const panel = el("div", { class: "score-panel", "data-role": "score" });
  panel.appendChild(el("h2", {}, "game over"));
  const score = over.score === null ? "n/a" : `${over.score.toFixed(1)}% of optimal`;
  panel.appendChild(el("div", { class: "score-value" }, score));
  return panel;
}

function renderToasts(vm: ViewModel): HTMLElement {
  const box = el("div", { class: "toasts", "data-role": "toasts" });
  for (const toast of vm.toasts.slice(-5)) {
    box.appendChild(el("div", { class: "toast" },
                       toast.tag ? `${toast.tag}: ${toast.reason}` : toast.reason));
  }
  return box;
}

// -- traffic ------------------------------------------------------------------

function carPoint(road: RoadView, fraction: number,
                  layout: Record<string, [number, number]>): [number, number] {
  const [x1, y1] = layout[road.from];
  const [x2, y2] = layout[road.to];
  const x = x1 + (x2 - x1) * fraction;
  const y = y1 + (y2 - y1) * fraction;
  // offset each direction to its right so opposing flows are distinguishable
  const len = Math.hypot(x2 - x1, y2 - y1) || 1;
  const ox = (-(y2 - y1) / len) * 6;
  const oy = ((x2 - x1) / len) * 6;
  return [x + ox, y + oy];
}

function renderTraffic(vm: ViewModel, frame: TrafficFrame): HTMLElement {
  const container = el("div", { class: "traffic" });
  const nodes = [...new Set(frame.roads.flatMap((r) => [r.from, r.to]))].sort();
  const layout = layoutFor(nodes);

  const svg = svgEl("svg", { viewBox: "0 0 480 400", class: "network",
                             "data-role": "network" });
  for (const road of frame.roads) {
    const [x1, y1] = layout[road.from];
    const [x2, y2] = layout[road.to];
    const mid = carPoint(road, 0.5, layout);
    const line = svgEl("line", {
      x1: String(x1), y1: String(y1), x2: String(x2), y2: String(y2),
      class: `road ${STATUS_CLASS[road.status]}`,
      "data-road": road.id,
      "data-status": road.status,
    });
    svg.appendChild(line);
    svg.appendChild(svgEl("text", {
      x: String(mid[0]), y: String(mid[1] - 8), class: "road-label",
    }, `${road.occupancy}/${road.capacity} $${road.toll.toFixed(2)}`));
  }
  for (const [node, [x, y]] of Object.entries(layout)) {
    svg.appendChild(svgEl("circle", { cx: String(x), cy: String(y), r: "14",
                                      class: "node" }));
    svg.appendChild(svgEl("text", { x: String(x), y: String(y + 4),
                                    class: "node-label" }, node));
  }
  for (const car of frame.cars) {
    if (!car.road) continue;
    const road = frame.roads.find((r) => r.id === car.road);
    if (!road) continue;
    const [x, y] = carPoint(road, car.fraction ?? 0, layout);
    svg.appendChild(svgEl("circle", { cx: x.toFixed(1), cy: y.toFixed(1),
                                      r: "2", class: "car" }));
  }
  container.appendChild(svg);

  const readouts = el("div", { class: "readouts" });
  readouts.appendChild(el("span", { "data-role": "transits" },
                          `sink transits: ${frame.transits}`));
  if (vm.budget !== null) {
    readouts.appendChild(el("span", { "data-role": "budget" },
                            ` budget: $${vm.budget.toFixed(2)}`));
  }
  container.appendChild(readouts);

  const controls = el("div", { class: "controls", "data-role": "toll-controls" });
  for (const road of frame.roads) {
    const row = el("div", { class: "control-row" });
    row.appendChild(el("span", { class: "control-label" },
                       `${road.id} $${road.toll.toFixed(2)} `));
    row.appendChild(el("button", {
      "data-action": "toll", "data-target": road.id, "data-delta": "0.01",
    }, "+"));
    row.appendChild(el("button", {
      "data-action": "toll", "data-target": road.id, "data-delta": "-0.01",
    }, "-"));
    controls.appendChild(row);
  }
  container.appendChild(controls);
  return container;
}

// -- water ---------------------------------------------------------------------

function renderWater(vm: ViewModel, frame: WaterFrame): HTMLElement {
  const container = el("div", { class: "water" });
  container.appendChild(el("div", { class: "day" },
                           `day ${frame.day}, period ${frame.period}`));

  const gauge = el("div", { class: "tank", "data-role": "tank" });
  gauge.appendChild(el("div", { class: "tank-level",
                               style: `height:${Math.min(100, frame.level)}%` }));
  gauge.appendChild(el("span", {}, `level: ${frame.level}`));
  container.appendChild(gauge);

  const tiles = el("div", { class: "price-tiles", "data-role": "price-tiles" });
  frame.prices.forEach((price, i) => {
    const period = i + 1;
    const tile = el("div", { class: "tile", "data-period": String(period) });
    tile.appendChild(el("div", { class: "tile-price" }, `$${price.toFixed(1)}`));
    tile.appendChild(el("div", { class: "tile-consumption" },
                        `used ${frame.consumption[i]}`));
    tile.appendChild(el("button", {
      "data-action": "price", "data-target": String(period), "data-delta": "0.1",
    }, "+"));
    tile.appendChild(el("button", {
      "data-action": "price", "data-target": String(period), "data-delta": "-0.1",
    }, "-"));
    tiles.appendChild(tile);
  });
  container.appendChild(tiles);

  const stats = el("div", { class: "readouts" });
  stats.appendChild(el("span", { "data-role": "shed" },
                       `tasks shed: ${frame.shed_count} `
                       + `(value ${frame.shed_value.toFixed(1)})`));
  stats.appendChild(el("span", { "data-role": "aggregate" },
                       ` happiness: ${frame.aggregate_utility.toFixed(1)}`));
  if (vm.quotaUsed !== null && vm.quotaMax !== null) {
    stats.appendChild(el("span", { "data-role": "quota" },
                         ` changes today: ${vm.quotaUsed}/${vm.quotaMax}`));
  }
  container.appendChild(stats);

  const tenants = el("div", { class: "tenants", "data-role": "tenants" });
  frame.happiness.forEach((h, i) => {
    tenants.appendChild(el("div", { class: "tenant" },
                           `tenant ${i}: ${h.toFixed(1)}`));
  });
  container.appendChild(tenants);
  return container;
}

/** Wire click handling once; rendering may rebuild buttons freely. */
export function bindControls(vm: ViewModel, root: HTMLElement): void {
  root.addEventListener("click", (ev) => {
    const target = ev.target as HTMLElement | null;
    const button = target?.closest?.("[data-action]") as HTMLElement | null;
    if (!button) return;
    const delta = Number(button.getAttribute("data-delta"));
    const action = button.getAttribute("data-action");
    if (action === "toll") {
      vm.clickToCommand("toll-change", button.getAttribute("data-target")!, delta);
    } else if (action === "price") {
      vm.clickToCommand("price-change",
                        Number(button.getAttribute("data-target")), delta);
    }
  });
}
