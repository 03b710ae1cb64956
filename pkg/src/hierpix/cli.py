"""Command-line surface: build, extract, eval, serve."""

from __future__ import annotations

import csv
import json
import sys
import time
from pathlib import Path

import click
import numpy as np

from . import imgio
from .features import assemble_features, position_planes, rgb_to_lab
from .hierarchy import HierarchyParams, MergeSequence, build_hierarchy, extract_partition
from .metrics import evaluate
from .partition import grid_partition
from .rag import build_rag


def _fail(message: str) -> "click.exceptions.Exit":
    click.echo(f"error: {message}", err=True)
    return SystemExit(1)


def _load_inputs(
    image_path: str,
    fine_path: str | None,
    objects_path: str | None,
    features_path: str | None,
    attention_path: str | None,
    clicks_path: str | None,
    init_grid: int | None,
):
    """Shared ingestion for build/serve. Returns a dict of arrays."""
    image = imgio.load_image(image_path)
    height, width = image.shape[:2]

    if fine_path is not None:
        fine = imgio.load_label_map(fine_path)
        if fine.shape != (height, width):
            raise ValueError(
                f"fine partition is {fine.shape[::-1]}, image is {(width, height)}"
            )
    elif init_grid is not None:
        fine = grid_partition(width, height, init_grid)
    else:
        raise ValueError("supply a fine partition (--fine) or --init-grid N")

    if objects_path is not None:
        objects = imgio.load_label_map(objects_path)
        if objects.shape != (height, width):
            raise ValueError(
                f"object map is {objects.shape[::-1]}, image is {(width, height)}"
            )
    else:
        objects = np.zeros((height, width), dtype=np.int32)

    lab = rgb_to_lab(image)
    pos = position_planes(width, height)
    deep = None
    if features_path is not None:
        deep = imgio.load_feature_tensor(features_path, width, height)
    features = assemble_features(lab, pos, deep)

    base_attention = None
    if attention_path is not None:
        raw = imgio.load_attention_map(attention_path)
        if raw.shape != (height, width):
            from .features import resample_attention

            raw = resample_attention(raw, width, height)
        base_attention = raw

    clicks = imgio.load_clicks(clicks_path) if clicks_path is not None else []

    return {
        "image": image,
        "fine": fine,
        "objects": objects,
        "features": features,
        "base_attention": base_attention,
        "clicks": clicks,
    }


def _effective_attention(inputs, width: int, height: int):
    from .features import clicks_to_attention

    if inputs["clicks"]:
        return clicks_to_attention(
            inputs["clicks"], inputs["base_attention"], width, height
        )
    return inputs["base_attention"]


@click.group()
def main() -> None:
    """Hierarchical superpixel engine."""


_common_input_options = [
    click.option("--fine", "fine_path", type=click.Path(), default=None,
                 help="Fine partition (16-bit label PNG)."),
    click.option("--objects", "objects_path", type=click.Path(), default=None,
                 help="Object prior map (16-bit label PNG)."),
    click.option("--features", "features_path", type=click.Path(), default=None,
                 help="Deep feature tensor (HSPF binary)."),
    click.option("--attention", "attention_path", type=click.Path(), default=None,
                 help="Attention map (single-channel PNG)."),
    click.option("--clicks", "clicks_path", type=click.Path(), default=None,
                 help="Click file (JSON array)."),
    click.option("--init-grid", "init_grid", type=int, default=None,
                 help="Fallback: start from a grid of N regions."),
    click.option("--wpos", "w_pos", type=float, default=5.0, show_default=True,
                 help="Spatial weight coefficient."),
    click.option("--watt", "w_att", type=float, default=0.0, show_default=True,
                 help="Attention weight (0 disables modulation)."),
    click.option("--attention-mode", "attention_mode",
                 type=click.Choice(["auto", "off", "superpixel", "object"]),
                 default="auto", show_default=True,
                 help="Attention aggregation; auto = object when a source is present."),
]


def _with_input_options(f):
    for opt in reversed(_common_input_options):
        f = opt(f)
    return f


def _resolve_attention_mode(mode: str, has_attention_source: bool) -> str:
    if mode == "auto":
        return "object" if has_attention_source else "off"
    return mode


@main.command()
@click.argument("image_path", type=click.Path())
@_with_input_options
@click.option("-o", "--output", "output_path", type=click.Path(), required=True,
              help="Merge sequence output (JSON).")
def build(image_path, output_path, w_pos, w_att, attention_mode, **input_paths):
    """Build the full merge hierarchy for an image."""
    try:
        inputs = _load_inputs(image_path, **input_paths)
        height, width = inputs["image"].shape[:2]
        attention = _effective_attention(inputs, width, height)
        mode = _resolve_attention_mode(attention_mode, attention is not None)

        t0 = time.perf_counter()
        graph = build_rag(
            inputs["fine"], inputs["objects"], inputs["features"], attention, mode
        )
        params = HierarchyParams(
            n_f=graph.n_alive, w_pos=w_pos, w_att=w_att, attention_mode=mode
        )
        seq = build_hierarchy(graph, params)
        elapsed = time.perf_counter() - t0
    except (OSError, ValueError) as exc:
        raise _fail(str(exc))

    text = seq.to_json()
    tmp = Path(str(output_path) + ".tmp")
    tmp.write_text(text)
    tmp.replace(output_path)
    p1, p2 = seq.phase_counts()
    click.echo(
        f"built hierarchy: n_f={seq.n_f} phase1={p1} phase2={p2} "
        f"time={elapsed:.3f}s -> {output_path}"
    )


@main.command()
@click.argument("seq_path", type=click.Path())
@click.argument("fine_path", type=click.Path())
@click.option("--k", "k_values", required=True,
              help="Comma-separated region counts, e.g. 1250,500,150,50.")
@click.option("-o", "--outdir", "outdir", type=click.Path(), required=True)
def extract(seq_path, fine_path, k_values, outdir):
    """Extract fixed-scale partitions from a merge sequence."""
    try:
        ks = [int(v) for v in k_values.split(",") if v.strip()]
        if not ks:
            raise ValueError("no K values given")
        seq = MergeSequence.load(seq_path)
        fine = imgio.load_label_map(fine_path)
        out = Path(outdir)
        out.mkdir(parents=True, exist_ok=True)
        stem = Path(fine_path).stem
        for k in ks:
            labels = extract_partition(seq, fine, k)
            path = out / f"{stem}_k{k}.png"
            imgio.save_label_map(labels, path)
            click.echo(f"k={k} -> {path}")
    except (OSError, ValueError) as exc:
        raise _fail(str(exc))


def _collect_gts(gt_path: str) -> list[np.ndarray]:
    p = Path(gt_path)
    if p.is_dir():
        files = sorted(p.glob("*.png"))
        if not files:
            raise ValueError(f"no ground-truth PNGs in {p}")
        return [imgio.load_label_map(f) for f in files]
    return [imgio.load_label_map(p)]


@main.command("eval")
@click.argument("partition_paths", type=click.Path(), nargs=-1, required=True)
@click.option("--gt", "gt_path", type=click.Path(), required=True,
              help="Ground truth label PNG, or a directory of them (averaged).")
@click.option("--eps", type=int, default=2, show_default=True,
              help="Boundary recall tolerance in pixels (Chebyshev).")
@click.option("--coarse", "coarse_path", type=click.Path(), default=None,
              help="Coarser partition for the nestedness score.")
@click.option("--json", "json_path", type=click.Path(), default=None)
@click.option("--csv", "csv_path", type=click.Path(), default=None)
def eval_cmd(partition_paths, gt_path, eps, coarse_path, json_path, csv_path):
    """Evaluate partitions against ground truth."""
    try:
        gts = _collect_gts(gt_path)
        coarse = (
            imgio.load_label_map(coarse_path) if coarse_path is not None else None
        )
        reports = []
        for path in partition_paths:
            labels = imgio.load_label_map(path)
            report = evaluate(labels, gts, eps=eps, coarse=coarse)
            reports.append((Path(path).name, report))
    except (OSError, ValueError) as exc:
        raise _fail(str(exc))

    payload = [{"image": name, **rep.to_dict()} for name, rep in reports]
    text = json.dumps(payload, indent=2) + "\n"
    if json_path is not None:
        Path(json_path).write_text(text)
    else:
        click.echo(text, nl=False)
    if csv_path is not None:
        with open(csv_path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(["image", "k", "asa", "br", "cd", "src"])
            for name, rep in reports:
                writer.writerow([name, rep.k, rep.asa, rep.br, rep.cd, rep.src])


@main.command()
@click.argument("image_path", type=click.Path())
@_with_input_options
@click.option("--gt", "gt_path", type=click.Path(), default=None,
              help="Ground truth for the /api/metrics endpoint.")
@click.option("--ui", "ui_dir", type=click.Path(), default=None,
              help="Static UI asset directory served at /.")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(image_path, w_pos, w_att, attention_mode, gt_path, ui_dir, host, port,
          **input_paths):
    """Serve the interactive session over HTTP."""
    import uvicorn

    from .service import Session, SessionInputs, create_app

    try:
        inputs = _load_inputs(image_path, **input_paths)
        gts = tuple(_collect_gts(gt_path)) if gt_path is not None else ()
        session_inputs = SessionInputs(
            image=inputs["image"],
            features=inputs["features"],
            fine=inputs["fine"],
            objects=inputs["objects"],
            base_attention=inputs["base_attention"],
            ground_truths=gts,
        )
        has_source = inputs["base_attention"] is not None or bool(inputs["clicks"])
        mode = _resolve_attention_mode(attention_mode, has_source)
        session = Session(session_inputs, w_pos=w_pos, w_att=w_att, attention_mode=mode)
        if inputs["clicks"]:
            session.add_clicks(inputs["clicks"])
    except (OSError, ValueError) as exc:
        raise _fail(str(exc))

    if ui_dir is None:
        default_ui = Path("frontend") / "dist"
        if default_ui.is_dir():
            ui_dir = str(default_ui)
    app = create_app(session, ui_dir=ui_dir)
    click.echo(f"serving n_f={session.n_f} on http://{host}:{port}")
    uvicorn.run(app, host=host, port=port, log_level="warning")


if __name__ == "__main__":
    sys.exit(main())
