"""Render the emitted figure CSVs to PNG files.

Kept separate from the evaluation core: plots are produced from the
delimited output, so a report can always be re-rendered without
recomputing any ranking. Lines starting with '#' in the CSVs are header
comments and are skipped.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

_STYLES = ["-o", "--s", ":^", "-.v", "-d", "--x", ":p", "-.h"]


def _read_csv(path: Path) -> list[dict[str, str]]:
    with open(path, newline="", encoding="utf-8") as f:
        rows = [line for line in f if not line.startswith("#")]
    return list(csv.DictReader(rows))


def _by_model(rows: list[dict[str, str]], x_key: str, y_key: str) -> dict[str, tuple[list, list]]:
    series: dict[str, tuple[list, list]] = {}
    for row in rows:
        xs, ys = series.setdefault(row.get("model", ""), ([], []))
        xs.append(row[x_key])
        ys.append(float(row[y_key]))
    return series


def _render_lines(series: dict[str, tuple[list, list]], title: str, x_label: str,
                  y_label: str, out_path: Path, numeric_x: bool = False) -> None:
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for i, (model, (xs, ys)) in enumerate(sorted(series.items())):
        if numeric_x:
            xs = [float(x) for x in xs]
        ax.plot(xs, ys, _STYLES[i % len(_STYLES)], label=model or None, linewidth=1.5)
    ax.set_xlabel(x_label)
    ax.set_ylabel(y_label)
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    if any(series):
        ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)


def render_length_figure(csv_path: str | Path, out_path: str | Path | None = None) -> Path:
    csv_path = Path(csv_path)
    out_path = Path(out_path) if out_path else csv_path.with_suffix(".png")
    series = _by_model(_read_csv(csv_path), "length", "map")
    _render_lines(series, "MAP vs explanation length", "gold explanation size",
                  "MAP", out_path)
    return out_path


def render_precision_figure(csv_path: str | Path, out_path: str | Path | None = None) -> Path:
    csv_path = Path(csv_path)
    out_path = Path(out_path) if out_path else csv_path.with_suffix(".png")
    series = _by_model(_read_csv(csv_path), "k", "precision")
    _render_lines(series, "Precision@K", "K", "precision", out_path, numeric_x=True)
    return out_path


def render_sweep_figure(csv_path: str | Path, out_path: str | Path | None = None) -> Path:
    csv_path = Path(csv_path)
    out_path = Path(out_path) if out_path else csv_path.with_suffix(".png")
    rows = _read_csv(csv_path)
    series = {"": ([row["k"] for row in rows], [float(row["map"]) for row in rows])}
    _render_lines(series, "MAP vs neighbour count", "k (nearest hypotheses)",
                  "MAP", out_path, numeric_x=True)
    return out_path


def render_figures(figures_dir: str | Path) -> list[Path]:
    """Render every known figure CSV present in a directory."""
    figures_dir = Path(figures_dir)
    renderers = {
        "map_by_length.csv": render_length_figure,
        "precision_at_k.csv": render_precision_figure,
        "knn_sweep.csv": render_sweep_figure,
    }
    rendered = []
    for name, renderer in renderers.items():
        csv_path = figures_dir / name
        if csv_path.is_file():
            rendered.append(renderer(csv_path))
    return rendered
