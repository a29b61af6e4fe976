"""Command-line interface: corpus generation, detection dumps, scenario runs, serving.

Exit codes: 0 on success, 1 when a run's golden expectations mismatch,
2 for usage, parse, or I/O failures.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import numpy as np

from .control import events_to_jsonl
from .imaging import Frame, directory_source, save_frame
from .metrics import MetricsReport
from .scripts import BUILDERS, bundled_names, load_bundled
from .simcam import (
    BACKGROUND_KINDS,
    REFERENCE_NOISE_SIGMA,
    Renderer,
    Scenario,
    SceneConfig,
    ScenarioError,
    compare_expected,
    load_scenario,
    make_background,
    run_scenario,
)
from .spot import DetectorConfig, detect, threshold_histogram


class IOFailure(click.ClickException):
    exit_code = 2


@click.group()
@click.version_option(package_name="laps")
def main() -> None:
    """Laser-pointer presentation pipeline tools."""


@main.command()
@click.option("--kind", type=click.Choice(BACKGROUND_KINDS), default="multi", show_default=True)
@click.option("--count", type=click.IntRange(min=1), default=10, show_default=True)
@click.option("--seed", type=int, default=0, envvar="LAPS_SEED", show_default=True)
@click.option("--noise", type=click.FloatRange(min=0), default=REFERENCE_NOISE_SIGMA, show_default=True)
@click.option("--k1", type=float, default=0.0, show_default=True)
@click.option("--out", type=click.Path(file_okay=False, path_type=Path), required=True)
def gen(kind: str, count: int, seed: int, noise: float, k1: float, out: Path) -> None:
    """Render a deterministic camera-frame corpus with a ground-truth sidecar."""
    scene = SceneConfig(noise_sigma=noise, k1=k1, seed=seed)
    try:
        background = make_background(kind, seed, scene.screen_w, scene.screen_h)
    except ValueError as exc:
        raise IOFailure(str(exc))
    renderer = Renderer(scene, background)
    rng = np.random.default_rng((seed, 0xC0FFEE))
    margin = 40.0
    try:
        out.mkdir(parents=True, exist_ok=True)
        sidecar = (out / "ground_truth.jsonl").open("w")
        with sidecar:
            for i in range(count):
                x = float(rng.uniform(margin, scene.screen_w - 1 - margin))
                y = float(rng.uniform(margin, scene.screen_h - 1 - margin))
                frame, truth = renderer.render(True, (x, y), i)
                name = f"{i:05d}.ppm"
                save_frame(frame, out / name)
                record = {"frame": i, "file": name, **truth.to_json_obj()}
                sidecar.write(json.dumps(record) + "\n")
            manifest = {"kind": kind, "seed": seed, "count": count, "scene": scene.to_json_obj()}
            (out / "corpus.json").write_text(json.dumps(manifest, indent=2) + "\n")
    except OSError as exc:
        raise IOFailure(f"cannot write corpus: {exc}")
    click.echo(f"wrote {count} frames to {out}")


@main.command(name="detect")
@click.argument("input_dir", type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.option("--threshold", type=click.IntRange(0, 255), default=200, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False, allow_dash=True, path_type=Path), default="-", show_default=True)
@click.option("--histogram", type=click.Path(dir_okay=False, path_type=Path), default=None)
def detect_cmd(input_dir: Path, threshold: int, out: Path, histogram: Path | None) -> None:
    """Run spot detection over a frame directory; dump one JSON line per frame."""
    cfg = DetectorConfig(threshold=threshold)
    truths: dict[str, dict] = {}
    if histogram is not None:
        sidecar = input_dir / "ground_truth.jsonl"
        if not sidecar.exists():
            raise IOFailure(f"--histogram needs {sidecar} (generate the corpus with 'laps gen')")
        for line in sidecar.read_text().splitlines():
            record = json.loads(line)
            truths[record["file"]] = record
    try:
        source = directory_source(input_dir)
    except Exception as exc:
        raise IOFailure(str(exc))
    lines = []
    samples: list[tuple[Frame, list[tuple[int, int]]]] = []
    for frame, path in zip(source, source.paths):
        det = detect(frame, cfg)
        record: dict = {"frame": frame.index, "file": path.name, "detected": det is not None}
        if det is not None:
            record.update({"x": det.x, "y": det.y, "n": det.n})
        lines.append(json.dumps(record))
        if histogram is not None:
            truth = truths.get(path.name)
            if truth is None or "core" not in truth:
                raise IOFailure(f"no ground-truth core region for {path.name}")
            samples.append((frame, [tuple(p) for p in truth["core"]]))
    text = "\n".join(lines) + "\n"
    if str(out) == "-":
        click.echo(text, nl=False)
    else:
        out.write_text(text)
    if histogram is not None:
        counts = threshold_histogram(samples)
        histogram.write_text(json.dumps({"bin_width": 5, "counts": counts.tolist()}) + "\n")
        click.echo(f"wrote histogram to {histogram}", err=True)


@main.command()
@click.argument("scenario")
@click.option("--report", type=click.Path(dir_okay=False, path_type=Path), default=None)
@click.option("--log", "log_path", type=click.Path(dir_okay=False, path_type=Path), default=None)
def run(scenario: str, report: Path | None, log_path: Path | None) -> None:
    """Run a scenario file (or bundled name); exit 0 only if its golden events match."""
    try:
        if Path(scenario).exists():
            scn = load_scenario(scenario)
        elif scenario in BUILDERS:
            scn = load_bundled(scenario)
        else:
            raise IOFailure(
                f"no such scenario file or bundled name {scenario!r} (bundled: {', '.join(bundled_names())})"
            )
        result = run_scenario(scn)
    except (OSError, ScenarioError) as exc:
        raise IOFailure(str(exc))
    if log_path is not None:
        log_path.write_text(events_to_jsonl(result.events))
    metrics = MetricsReport.compute(result.trace, strict=False)
    if report is not None:
        report.write_text(metrics.to_json() + "\n")
    click.echo(metrics.table())
    diffs = compare_expected(result, scn)
    if scn.expect is not None:
        if diffs:
            click.echo("golden event mismatch:", err=True)
            for diff in diffs:
                click.echo(f"  {diff}", err=True)
            sys.exit(1)
        click.echo(f"golden events matched ({len(scn.expect)} expected)")


@main.command()
@click.option("--port", type=click.IntRange(1, 65535), default=8080, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
def serve(port: int, host: str) -> None:
    """Serve the session endpoint until interrupted."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()
