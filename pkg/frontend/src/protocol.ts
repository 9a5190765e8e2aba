/** Gateway message schemas. Field names mirror the server documentation. */

export interface Envelope<T = unknown> {
  type: string;
  session: string | null;
  seq: number;
  payload: T;
}

export interface RoadView {
  id: string;
  from: string;
  to: string;
  occupancy: number;
  capacity: number;
  toll: number;
  status: "none" | "yellow" | "red";
}

export interface CarView {
  id: number;
  road?: string;
  fraction?: number;
  node?: string;
}

export interface ForecastView {
  tick: number;
  elapsed: number;
  horizon_s: number;
  peaks: Record<string, number>;
  statuses: Record<string, "none" | "yellow" | "red">;
}

export interface TrafficFrame {
  phase: "training" | "live" | "finished";
  scenario: "traffic";
  tick: number;
  elapsed: number;
  roads: RoadView[];
  cars: CarView[];
  transits: number;
  budget?: number;
  forecast?: ForecastView;
}

export interface WaterFrame {
  phase: "training" | "live" | "finished";
  scenario: "water";
  tick: number;
  elapsed: number;
  day: number;
  period: number;
  level: number;
  prices: number[];
  consumption: number[];
  consumed_today: number;
  shed_count: number;
  shed_value: number;
  happiness: number[];
  aggregate_utility: number;
  quota_used?: number;
  quota_max?: number;
}

export type Frame = TrafficFrame | WaterFrame;

export interface CommandPayload {
  kind: "toll-change" | "price-change";
  target: string | number;
  delta: number;
  client_tag: string;
  not_before_tick?: number;
}

export interface CommandResult {
  client_tag: string | null;
  accepted: boolean;
  reason: string;
  balance?: number;
  quota_used?: number;
}

export interface GameOver {
  final: Record<string, unknown>;
  score: number | null;
}

export interface OpenedPayload {
  phase: string;
  frame: Frame;
}

export interface ErrorPayload {
  message: string;
  field?: string;
  reason?: string;
}

export function envelope<T>(type: string, session: string | null, payload: T): Envelope<T> {
  return { type, session, seq: 0, payload };
}
