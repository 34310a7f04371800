"""Operator command line: preprocess, evaluate, epvmap, replay, serve, fixture.

Exit codes: 0 success, 1 runtime failure, 2 input validation failure.
Every command is deterministic given identical inputs; --seed is accepted
and reserved (nothing in the core path draws randomness).
"""

from __future__ import annotations

import sys
import time
from pathlib import Path

import click

from . import __version__
from .ability import NbaZonePartition, build_epv_map, dump_epv_maps, load_partition
from .bundle import build_bundle, load_bundle, save_bundle
from .config import PipelineConfig, load_config
from .errors import HoopsightError, ParseError, ValidationError
from .session import replay as replay_session
from .tracking import evaluate_ap, high_cluster_baseline, postprocess
from .wire import write_dump

EXIT_RUNTIME = 1
EXIT_VALIDATION = 2


def _load_cfg(config, opt) -> PipelineConfig:
    overrides = {}
    for item in opt:
        if "=" not in item:
            raise ValidationError(f"--opt expects section.key=value, got {item!r}")
        key, value = item.split("=", 1)
        overrides[key.strip()] = value.strip()
    return load_config(config, overrides)


def _fail(exc: Exception) -> None:
    click.echo(f"error: {exc}", err=True)
    if isinstance(exc, (ValidationError, ParseError)):
        sys.exit(EXIT_VALIDATION)
    sys.exit(EXIT_RUNTIME)


@click.group()
@click.version_option(__version__)
def main() -> None:
    """Basketball-video augmentation engine."""


_config_opts = [
    click.option("--config", type=click.Path(exists=True, dir_okay=False),
                 default=None, help="YAML config file."),
    click.option("--opt", multiple=True, metavar="SECTION.KEY=VALUE",
                 help="Override one config key (repeatable)."),
    click.option("--seed", type=int, default=0, show_default=True,
                 help="Reserved; the core path is deterministic."),
]


def _with_config_opts(fn):
    for opt in reversed(_config_opts):
        fn = opt(fn)
    return fn


@main.command()
@click.option("--detections", required=True, type=click.Path())
@click.option("--tracking", required=True, type=click.Path())
@click.option("--masks", required=True, type=click.Path())
@click.option("--shots", required=True, type=click.Path())
@click.option("--defense", required=True, type=click.Path())
@click.option("--roster", required=True, type=click.Path())
@click.option("--keypoints", type=click.Path(), default=None)
@click.option("--partition", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Region partition file (default: built-in zones).")
@click.option("--court", "court_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Screen-space court polygon (x,y per line).")
@click.option("--game-id", default="game", show_default=True)
@click.option("--out", required=True, type=click.Path(file_okay=False),
              help="Bundle output directory.")
@_with_config_opts
def preprocess(detections, tracking, masks, shots, defense, roster, keypoints,
               partition, court_path, game_id, out, config, opt, seed) -> None:
    """Build a servable game bundle from raw input files."""
    try:
        cfg = _load_cfg(config, opt)
        part = load_partition(partition) if partition else None
        polygon = None
        if court_path:
            polygon = []
            for line in Path(court_path).read_text().splitlines():
                line = line.strip()
                if not line:
                    continue
                x, y = line.split(",")
                polygon.append((float(x), float(y)))
        bundle = build_bundle(
            game_id=game_id, detections_path=detections, tracking_path=tracking,
            masks_path=masks, shots_path=shots, defense_path=defense,
            roster_path=roster, keypoints_path=keypoints, config=cfg,
            partition=part, court_polygon=polygon)
        save_bundle(bundle, out)
    except HoopsightError as exc:
        _fail(exc)
    click.echo(f"bundle written to {out}: {bundle.frame_count} frames, "
               f"{len(bundle.tracks)} tracked boxes")


def _print_grid(rows: list[tuple[str, float, float, float]],
                deltas: dict[str, tuple[float, float, float]] | None = None) -> None:
    click.echo(f"{'Step':<18} {'AP50:95':>10} {'AP50':>10} {'AP75':>10}")
    for name, a, b, c in rows:
        cells = []
        for value, key in ((a, 0), (b, 1), (c, 2)):
            text = f"{100 * value:.1f}"
            if deltas and name in deltas:
                text += f" ({deltas[name][key]:+.1f})"
            cells.append(f"{text:>10}")
        click.echo(f"{name:<18} {cells[0]} {cells[1]} {cells[2]}")


def _print_timing(rows: list[tuple[str, float]]) -> None:
    click.echo()
    click.echo(f"{'Step':<28} {'Time (ms)':>10}")
    for name, ms in rows:
        click.echo(f"{name:<28} {ms:>10.2f}")


@main.command()
@click.option("--predictions", required=True, type=click.Path(),
              help="Raw detections file to post-process and score.")
@click.option("--ground-truth", required=True, type=click.Path())
@click.option("--out", type=click.Path(file_okay=False), default=None,
              help="Directory for evaluation.csv and evaluation.png.")
@_with_config_opts
def evaluate(predictions, ground_truth, out, config, opt, seed) -> None:
    """Score raw detections and the post-processed tracks against ground truth."""
    from . import ingest
    from .charts import render_evaluation_chart

    try:
        cfg = _load_cfg(config, opt)
        preds = ingest.load_detections(predictions)
        gt = ingest.load_detections(ground_truth)

        t0 = time.perf_counter()
        baseline = high_cluster_baseline(preds, cfg.matcher)
        t1 = time.perf_counter()
        tracked = postprocess(preds, cfg.matcher)
        t2 = time.perf_counter()
        report_det = evaluate_ap(baseline, gt)
        report_post = evaluate_ap(tracked, gt)
        t3 = time.perf_counter()
    except HoopsightError as exc:
        _fail(exc)

    n_frames = max(1, len({d.frame for d in preds}))
    deltas = {"Post-Processing": (
        100 * (report_post.ap_50_95 - report_det.ap_50_95),
        100 * (report_post.ap_50 - report_det.ap_50),
        100 * (report_post.ap_75 - report_det.ap_75))}
    rows = [("Player Detection", report_det.ap_50_95, report_det.ap_50,
             report_det.ap_75),
            ("Post-Processing", report_post.ap_50_95, report_post.ap_50,
             report_post.ap_75)]
    _print_grid(rows, deltas)
    _print_timing([
        ("Clustering (per frame)", 1000 * (t1 - t0) / n_frames),
        ("Post-Processing (per frame)", 1000 * (t2 - t1) / n_frames),
        ("AP evaluation (total)", 1000 * (t3 - t2)),
    ])
    if report_post.unknown_identities:
        click.echo(f"predictions for identities absent from ground truth: "
                   f"{', '.join(report_post.unknown_identities)}")

    if out:
        out_dir = Path(out)
        out_dir.mkdir(parents=True, exist_ok=True)
        lines = ["stage,ap_50_95,ap_50,ap_75\n"]
        for name, a, b, c in rows:
            lines.append(f"{name},{a!r},{b!r},{c!r}\n")
        (out_dir / "evaluation.csv").write_text("".join(lines))
        render_evaluation_chart(
            {"Player Detection": report_det, "Post-Processing": report_post},
            out_dir / "evaluation.png")
        click.echo(f"report written to {out_dir}")


@main.command()
@click.option("--shots", required=True, type=click.Path())
@click.option("--player", required=True)
@click.option("--partition", type=click.Path(exists=True, dir_okay=False),
              default=None)
@click.option("--out", required=True, type=click.Path(file_okay=False))
@_with_config_opts
def epvmap(shots, player, partition, out, config, opt, seed) -> None:
    """Build one player's EPV map: epvmap.csv plus a court chart."""
    from . import ingest
    from .charts import render_epv_chart

    try:
        _load_cfg(config, opt)
        part = load_partition(partition) if partition else NbaZonePartition()
        records = [s for s in ingest.load_shots(shots) if s.player == player]
        if not records:
            raise ValidationError(f"no shots for player {player!r}", field="player")
        epv_map = build_epv_map(records, part, player=player)
    except HoopsightError as exc:
        _fail(exc)

    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "epvmap.csv").write_text(dump_epv_maps({player: epv_map}))
    chart = render_epv_chart(epv_map, part, out_dir / "epvmap.png")
    click.echo(f"epv map written to {out_dir / 'epvmap.csv'}; chart at {chart}")


def _sparse_overrides(config, opt) -> dict | None:
    """Raw section->key mapping from file + flags, merged over bundle config."""
    if not config and not opt:
        return None
    import yaml

    data: dict = {}
    if config:
        raw = yaml.safe_load(Path(config).read_text()) or {}
        if not isinstance(raw, dict):
            raise ValidationError(f"config file {config} must contain a mapping")
        data = raw
    for item in opt:
        if "=" not in item or item.split("=", 1)[0].count(".") != 1:
            raise ValidationError(f"--opt expects section.key=value, got {item!r}")
        dotted, value = item.split("=", 1)
        section, key = dotted.strip().split(".")
        data.setdefault(section, {})[key] = yaml.safe_load(value.strip())
    return data


@main.command()
@click.option("--bundle", "bundle_path", required=True,
              type=click.Path(exists=True, file_okay=False))
@click.option("--gaze", "gaze_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Gaze trace to replay (timestamp,x,y,valid).")
@click.option("--out", required=True, type=click.Path(dir_okay=False),
              help="Binary render-command dump.")
@_with_config_opts
def replay(bundle_path, gaze_path, out, config, opt, seed) -> None:
    """Replay a bundle (optionally with a gaze trace) into a command dump."""
    from . import ingest

    try:
        overrides = _sparse_overrides(config, opt)
        b = load_bundle(bundle_path)
        trace = ingest.load_gaze_trace(gaze_path) if gaze_path else []
        with open(out, "wb") as fh:
            n = write_dump(fh, replay_session(b, trace,
                                              config_overrides=overrides))
    except HoopsightError as exc:
        _fail(exc)
    click.echo(f"{n} frames dumped to {out}")


@main.command()
@click.option("--bundles", "bundle_dir", required=True,
              type=click.Path(exists=True, file_okay=False),
              help="Directory containing bundle subdirectories.")
@click.option("--port", default=8765, show_default=True, type=int)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--speed", default=1.0, show_default=True, type=float,
              help="Pacing multiplier for the presentation clock.")
@click.option("--viewer", "viewer_dir", type=click.Path(file_okay=False),
              default=None, help="Static viewer directory to mount at /.")
def serve(bundle_dir, port, host, speed, viewer_dir) -> None:
    """Serve bundles to viewers over HTTP + WebSocket."""
    from .server import serve as run_server

    try:
        run_server(bundle_dir, port=port, host=host, speed=speed,
                   viewer_dir=viewer_dir)
    except HoopsightError as exc:
        _fail(exc)


@main.command()
@click.option("--out", required=True, type=click.Path(file_okay=False))
@click.option("--frames", default=120, show_default=True, type=int)
@click.option("--game-id", default="demo", show_default=True)
@click.option("--seed", type=int, default=7, show_default=True)
def fixture(out, frames, game_id, seed) -> None:
    """Generate a synthetic game's raw input files (stands in for league data)."""
    from .synth import make_game, write_game_files

    game = make_game(game_id=game_id, frame_count=frames, seed=seed)
    paths = write_game_files(game, out)
    click.echo(f"fixture files written to {out}: "
               f"{', '.join(sorted(p.name for p in paths.values()))}")


# Importable aliases for the command entry points.
cmd_preprocess = preprocess
cmd_evaluate = evaluate
cmd_epvmap = epvmap
cmd_replay = replay
cmd_serve = serve


if __name__ == "__main__":
    main()
