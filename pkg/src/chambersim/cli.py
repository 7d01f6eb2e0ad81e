"""Command-line entry points: train, simulate, live, eval.

Any of train/simulate/live can additionally expose the running session
over a WebSocket control endpoint (--serve host:port) for the operator
console or scripted clients.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

from .agent.qnet import QNetwork
from .agent.training import run_training
from .config import AppConfig, ConfigError, load_config
from .evaluate import base_meta, run_benchmark
from .metrics import RunTrace, format_report_table, write_report
from .rfbridge import RfBridge
from .scenarios import USE_CASE_NAMES
from .simulation import SimulationSession
from .server import serve_session


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, default=None, help="INI config file (defaults apply when omitted)")
    p.add_argument("--seed", type=int, default=0, help="random seed")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chambersim", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train the mobility policy")
    _add_common(p_train)
    p_train.add_argument("--policy", type=Path, default=Path("policy.json"), help="where to save the trained policy")
    p_train.add_argument("--log", type=Path, default=Path("training_log.csv"), help="per-step training log CSV")
    p_train.add_argument("--checkpoint", type=Path, default=None, help="checkpoint path used on interruption")
    p_train.add_argument("--serve", default=None, metavar="ADDR:PORT", help="expose the training run over WebSocket")
    p_train.add_argument("--quiet", action="store_true")

    p_sim = sub.add_parser("simulate", help="run a policy (or manual control) offline")
    _add_common(p_sim)
    p_sim.add_argument("--policy", type=Path, default=None, help="trained policy file")
    p_sim.add_argument("--use-case", default=None, choices=USE_CASE_NAMES, help="initial world")
    p_sim.add_argument("--ticks", type=int, default=None, help="number of ticks (default: evaluation run length)")
    p_sim.add_argument("--out", type=Path, default=None, metavar="TRACE.CSV", help="write the run trace here")
    p_sim.add_argument("--serve", default=None, metavar="ADDR:PORT")
    p_sim.add_argument("--realtime", action="store_true", help="pace ticks to wall time")
    p_sim.add_argument("--mode", default="simulation", choices=("simulation",), help=argparse.SUPPRESS)

    p_live = sub.add_parser("live", help="simulate in real time and export path loss to the RF emulator")
    _add_common(p_live)
    p_live.add_argument("--policy", type=Path, default=None)
    p_live.add_argument("--use-case", default=None, choices=USE_CASE_NAMES)
    p_live.add_argument("--ticks", type=int, default=None)
    p_live.add_argument("--out", type=Path, default=None, metavar="TRACE.CSV")
    p_live.add_argument("--serve", default=None, metavar="ADDR:PORT")
    p_live.add_argument("--rf-host", default=None, help="override bridge host from the config")
    p_live.add_argument("--rf-port", type=int, default=None, help="override bridge port from the config")

    p_eval = sub.add_parser("eval", help="run the use-case suite against the static baseline")
    _add_common(p_eval)
    p_eval.add_argument("--policy", type=Path, required=True)
    p_eval.add_argument("--out-dir", type=Path, default=Path("eval_out"), help="traces and report directory")
    p_eval.add_argument("--use-cases", nargs="+", default=list(USE_CASE_NAMES), choices=USE_CASE_NAMES)
    return parser


def _load_app(args) -> AppConfig:
    return load_config(args.config)


def cmd_train(args) -> int:
    app = _load_app(args)

    def progress(record):
        if not args.quiet and (record.step + 1) % 500 == 0:
            loss = f"{record.loss:.4f}" if record.loss is not None else "-"
            print(
                f"step {record.step + 1}/{app.training.episodes * app.training.episode_step_limit} "
                f"ep {record.episode} scen {record.scenario} eps {record.epsilon:.3f} loss {loss}",
                flush=True,
            )

    if args.serve:
        session = SimulationSession(app, mode="training", seed=args.seed)
        server = serve_session(session, args.serve)
        print(f"serving training session on ws://{server.host}:{server.port}", flush=True)
        try:
            session.run()
        finally:
            server.close()
        session.trainer.net.save(args.policy)
        session.trainer.log.write_csv(args.log)
    else:
        result = run_training(
            app,
            seed=args.seed,
            policy_path=args.policy,
            log_path=args.log,
            checkpoint_path=args.checkpoint,
            progress=progress,
        )
        means = ", ".join(f"{m:.4f}" for m in result.episode_mean_rewards)
        print(f"episode mean rewards: {means}")
    print(f"policy saved to {args.policy}")
    return 0


def _run_session(app, args, mode: str, bridge=None) -> int:
    policy = QNetwork.load(args.policy) if args.policy else None
    ticks = args.ticks if args.ticks is not None else app.evaluation.run_ticks
    trace = None
    if args.out is not None:
        trace_meta = base_meta(app, args.use_case or "manual", str(args.policy or "none"), args.seed)
        trace = RunTrace(meta=trace_meta)

    realtime = mode == "live" or bool(getattr(args, "realtime", False)) or bool(args.serve)
    session = SimulationSession(
        app,
        mode=mode,
        policy=policy,
        use_case=args.use_case,
        bridge=bridge,
        seed=args.seed,
        realtime=realtime,
        max_ticks=None if args.serve else ticks,
        trace=trace,
    )
    if args.serve:
        server = serve_session(session, args.serve)
        print(f"serving {mode} session on ws://{server.host}:{server.port}", flush=True)
        try:
            session.run()
        except KeyboardInterrupt:
            pass
        finally:
            server.close()
    else:
        session.run()
    if bridge is not None:
        bridge.stop(flush=True)
    if trace is not None:
        trace.write_csv(args.out)
        print(f"trace written to {args.out}")
    return 0


def cmd_simulate(args) -> int:
    app = _load_app(args)
    return _run_session(app, args, mode="simulation")


def cmd_live(args) -> int:
    app = _load_app(args)
    bridge_cfg = app.bridge
    if args.rf_host is not None:
        bridge_cfg = dataclasses.replace(bridge_cfg, host=args.rf_host)
    if args.rf_port is not None:
        bridge_cfg = dataclasses.replace(bridge_cfg, port=args.rf_port)
    bridge = RfBridge(bridge_cfg).start()
    return _run_session(app, args, mode="live", bridge=bridge)


def cmd_eval(args) -> int:
    app = _load_app(args)
    policy = QNetwork.load(args.policy)
    out_dir = args.out_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    reports = run_benchmark(
        app,
        policy,
        policy_id=args.policy.stem,
        seed=args.seed,
        use_cases=tuple(args.use_cases),
        out_dir=out_dir,
    )
    write_report(reports, out_dir / "report.json")
    print(format_report_table(reports))
    print(f"traces and report written to {out_dir}/")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "train": cmd_train,
        "simulate": cmd_simulate,
        "live": cmd_live,
        "eval": cmd_eval,
    }
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
