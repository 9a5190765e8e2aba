"""Command line front door.

Exit codes: 0 success, 1 configuration error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .config import ConfigError, RunConfig
from .engine import replay as engine_replay
from .engine import run_headless
from .forecast import accuracy as forecast_accuracy
from .harness import MatrixSpec, format_table, run_matrix
from .oracles import optimal_throughput_cached, optimal_welfare_cached
from .policies import make_policy
from .records import RecordError, RunRecord, compare_samples
from .rng import RngPool
from .water.tenants import generate_activities

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="regulab",
                                     description="regulated agent-ecology testbed")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one scenario headless")
    run.add_argument("--config", required=True)
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--policy", default=None)
    run.add_argument("--duration", type=float, default=None,
                     help="override duration (seconds for traffic, days for water)")
    run.add_argument("--out", default=None, help="write the run record here")

    matrix = sub.add_parser("matrix", help="run an experiment matrix")
    matrix.add_argument("--config", required=True)
    matrix.add_argument("--out", required=True)

    rep = sub.add_parser("replay", help="re-simulate a record and verify it")
    rep.add_argument("path")
    rep.add_argument("--speed", type=float, default=0.0,
                     help="pacing multiplier for streaming (0 = free run)")
    rep.add_argument("--stream", type=int, default=None, metavar="PORT",
                     help="also stream frames to console clients on this port")

    orc = sub.add_parser("oracle", help="compute the optimality oracle for a config")
    orc.add_argument("--config", required=True)
    orc.add_argument("--out", default=None)

    acc = sub.add_parser("accuracy", help="score a record's forecasts against reality")
    acc.add_argument("path")

    srv = sub.add_parser("serve", help="serve a live session for the console")
    srv.add_argument("--port", type=int, default=int(os.environ.get("REGULAB_PORT", 8700)))
    srv.add_argument("--config", required=True)
    srv.add_argument("--host", default="127.0.0.1")
    return parser


def _load_config(path: str, seed: int | None = None,
                 duration: float | None = None) -> RunConfig:
    with open(path) as f:
        data = json.load(f)
    if seed is not None:
        data["seed"] = seed
    if duration is not None:
        if data.get("scenario", "traffic") == "traffic":
            data["duration_s"] = duration
        else:
            data.setdefault("water", {})["days"] = int(duration)
    return RunConfig.from_dict(data)


def cmd_run(args) -> int:
    config = _load_config(args.config, args.seed, args.duration)
    policy = make_policy(args.policy)
    if config.regulator.power == "none" and policy is not None:
        raise ConfigError("policy", "power 'none' forces policy 'none'")
    record = run_headless(config, config.seed, policy=policy)
    if args.out:
        record.write(args.out)
    print(json.dumps(record.final, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_matrix(args) -> int:
    spec = MatrixSpec.from_file(args.config)
    done = []

    def progress(adaptivity, power, seed):
        done.append(seed)
        print(f"  [{len(done)}] {adaptivity}-{power} seed {seed}", flush=True)

    results = run_matrix(spec, args.out, progress=progress)
    print(format_table(results))
    print(f"summary written to {os.path.join(args.out, 'summary.csv')}")
    return EXIT_RUNTIME if any(c.failed for c in results) else EXIT_OK


def cmd_replay(args) -> int:
    record = RunRecord.read(args.path)
    if args.stream is not None:
        from .gateway import stream_replay
        stream_replay(record, args.stream, args.speed)
        return EXIT_OK
    replayed = engine_replay(record)
    divergence = compare_samples(record, replayed)
    if divergence is not None:
        print(divergence.describe(), file=sys.stderr)
        return EXIT_RUNTIME
    print(f"replay ok: {len(record.samples())} samples bit-identical")
    return EXIT_OK


def cmd_oracle(args) -> int:
    config = _load_config(args.config)
    if config.scenario == "traffic":
        result = optimal_throughput_cached(config)
    else:
        table = generate_activities(config.water, RngPool(config.seed).stream("setup"))
        result = optimal_welfare_cached(config, table)
    payload = result.to_dict()
    if args.out:
        with open(args.out, "w") as f:
            json.dump(payload, f, indent=2, sort_keys=True)
    print(json.dumps(payload, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_accuracy(args) -> int:
    record = RunRecord.read(args.path)
    forecasts = record.forecasts()
    if not forecasts:
        print("record has no forecast events", file=sys.stderr)
        return EXIT_RUNTIME
    capacities = {f"{r.from_node}>{r.to_node}": r.capacity
                  for r in record.config.traffic.network.roads}
    value = forecast_accuracy(forecasts, record.samples(), capacities,
                              record.config.forecast.horizon_s,
                              record.config.forecast.yellow_fraction)
    print(f"forecast status accuracy: {value:.4f} over {len(forecasts)} reports")
    return EXIT_OK


def cmd_serve(args) -> int:
    from .gateway import serve_forever
    config = _load_config(args.config)
    serve_forever(config, args.host, args.port)
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {"run": cmd_run, "matrix": cmd_matrix, "replay": cmd_replay,
                "oracle": cmd_oracle, "accuracy": cmd_accuracy, "serve": cmd_serve}
    try:
        return handlers[args.command](args)
    except (ConfigError, RecordError, FileNotFoundError, json.JSONDecodeError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except KeyboardInterrupt:
        return EXIT_RUNTIME
    except Exception as e:  # runtime failure with a recognizable exit code
        print(f"runtime failure: {e}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
