"""Command-line entry points: run, serve, replay."""

from __future__ import annotations

import sys
from pathlib import Path

import click

from .bus.router import read_busdump
from .config import ParseError, RunConfig, load_config
from .report import RunReport, write_report
from .sim.episode import EpisodeRunner


def _load(config_path: str | None) -> RunConfig:
    if config_path is None:
        return RunConfig()
    try:
        return load_config(config_path)
    except ParseError as exc:
        raise click.ClickException(f"config error: {exc}") from None


@click.group()
def main() -> None:
    """Desk-scale bin-picking cell simulator."""


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="YAML run configuration (defaults when omitted).")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--episodes", type=int, default=None,
              help="Override the episode count from the config.")
@click.option("--report", "report_path", type=click.Path(dir_okay=False), default=None,
              help="Write report.json plus CSV and figures alongside it.")
@click.option("--busdump", "busdump_path", type=click.Path(dir_okay=False), default=None,
              help="Capture all bus frames to a replayable dump.")
@click.option("--headless", is_flag=True, default=False,
              help="Skip figure rendering when writing the report.")
def run(config_path: str | None, seed: int, episodes: int | None,
        report_path: str | None, busdump_path: str | None, headless: bool) -> None:
    """Run headless episodes under the simulated clock."""
    cfg = _load(config_path)
    n_episodes = episodes if episodes is not None else cfg.episodes

    results = []
    for i in range(n_episodes):
        capture = None
        if busdump_path:
            if n_episodes == 1:
                capture = busdump_path
            else:
                base = Path(busdump_path)
                capture = str(base.with_name(f"{base.stem}_ep{i:03d}{base.suffix}"))
        runner = EpisodeRunner(cfg, seed + i, capture_path=capture)
        result = runner.run()
        runner.router.close()
        results.append(result)

    report = RunReport(cfg, seed, results)
    agg = report.aggregate_metrics()
    click.echo(f"episodes: {n_episodes}  picks: {agg.picks_succeeded}/{agg.picks_attempted} "
               f"succeeded ({agg.success_rate:.1%})")
    click.echo(f"throughput: {agg.picks_per_hour:.1f} picks/hour "
               f"({cfg.bins.placement} placement)")
    if agg.latency_ms:
        click.echo(f"latency trigger->move: mean {agg.latency_mean_ms:.0f} ms, "
                   f"max {agg.latency_max_ms:.0f} ms")
    for ep in results:
        click.echo(f"  seed {ep.seed}: {ep.final_state.value}"
                   + (f" unavailable={ep.unavailable}" if ep.unavailable else "")
                   + (" FAULT" if ep.faulted else ""))
    if report_path:
        artifacts = write_report(report, report_path, with_figures=not headless)
        click.echo("artifacts: " + ", ".join(str(p) for p in artifacts))

    sys.exit(1 if report.faulted else 0)


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              default=None)
@click.option("--port", type=int, default=8080, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--speed", type=float, default=1.0, show_default=True,
              help="Simulated-to-wall clock ratio.")
def serve(config_path: str | None, port: int, host: str, seed: int, speed: float) -> None:
    """Start the HMI backend with a live cell."""
    import uvicorn

    from .hmi.live import LiveCell
    from .hmi.service import create_app

    cfg = _load(config_path)
    cell = LiveCell(cfg, seed=seed, speed=speed)
    cell.start()
    static_dir = Path(__file__).resolve().parents[2] / "frontend" / "dist"
    app = create_app(cell, static_dir=static_dir if static_dir.is_dir() else None)
    try:
        uvicorn.run(app, host=host, port=port, log_level="warning")
    finally:
        cell.stop()


@main.command()
@click.argument("busdump", type=click.Path(exists=True, dir_okay=False))
def replay(busdump: str) -> None:
    """Decode a bus capture and print one line per frame."""
    try:
        records = read_busdump(busdump)
    except Exception as exc:
        raise click.ClickException(f"cannot replay {busdump}: {exc}") from None
    for ts, msg, seq in records:
        payload = msg.to_payload()
        compact = ", ".join(f"{k}={payload[k]}" for k in sorted(payload))
        if len(compact) > 100:
            compact = compact[:97] + "..."
        click.echo(f"{ts:>10} ms  {msg.TYPE_NAME:<16} seq={seq:<6} {compact}")
    click.echo(f"{len(records)} frames")


if __name__ == "__main__":
    main()
