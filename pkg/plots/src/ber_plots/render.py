"""Turn simulator results CSVs into log-scale error-rate figures.

Input files follow the `icqam simulate` schema
(`scheme,receiver,snr_db,trials,errors,error_rate,stderr` with `#`
provenance comments). One curve is drawn per (scheme, receiver) pair, in
file row order, passing through the exact CSV values; the only display
adjustment is clipping exact-zero rates to 1/(10*trials) so they exist
on the log axis, which is called out in the legend.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

HEADER = "scheme,receiver,snr_db,trials,errors,error_rate,stderr"
ALLOWED_SUFFIXES = (".svg", ".png")


class ResultsFormatError(ValueError):
    """A results CSV did not match the expected schema."""


@dataclass(frozen=True)
class ResultRow:
    scheme: str
    receiver: int
    snr_db: float
    trials: int
    errors: int
    error_rate: float
    stderr: float


@dataclass(frozen=True)
class PlotSpec:
    inputs: tuple[str, ...]
    output: str
    title: str | None = None
    schemes: tuple[str, ...] | None = None
    receivers: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        if not self.inputs:
            raise ResultsFormatError("at least one input CSV is required")
        if Path(self.output).suffix.lower() not in ALLOWED_SUFFIXES:
            raise ResultsFormatError(
                f"output must end in one of {ALLOWED_SUFFIXES}, got {self.output!r}"
            )


def read_results(path: str | Path) -> list[ResultRow]:
    """Parse one results CSV; errors carry the offending line number."""
    rows: list[ResultRow] = []
    saw_header = False
    with open(path) as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if line == HEADER:
                saw_header = True
                continue
            parts = line.split(",")
            if len(parts) != 7:
                raise ResultsFormatError(
                    f"{path}:{lineno}: expected 7 fields, got {len(parts)}"
                )
            try:
                rows.append(
                    ResultRow(
                        scheme=parts[0],
                        receiver=int(parts[1]),
                        snr_db=float(parts[2]),
                        trials=int(parts[3]),
                        errors=int(parts[4]),
                        error_rate=float(parts[5]),
                        stderr=float(parts[6]),
                    )
                )
            except ValueError as exc:
                raise ResultsFormatError(f"{path}:{lineno}: {exc}") from exc
    if not saw_header:
        raise ResultsFormatError(f"{path}: results header line not found")
    return rows


def _selected(rows, schemes, receivers):
    out = [
        r
        for r in rows
        if (schemes is None or r.scheme in schemes)
        and (receivers is None or r.receiver in receivers)
    ]
    if not out:
        raise ResultsFormatError("no rows left after applying scheme/receiver filters")
    return out


def build_figure(
    rows: Sequence[ResultRow],
    title: str | None = None,
    schemes: Sequence[str] | None = None,
    receivers: Sequence[int] | None = None,
):
    """One labeled curve per (scheme, receiver); y values pass through as-is.

    Returns the matplotlib figure; exact zeros are drawn at
    1/(10*trials) and flagged in the curve's legend entry.
    """
    selected = _selected(rows, schemes, receivers)
    groups: dict[tuple[str, int], list[ResultRow]] = {}
    for row in selected:
        groups.setdefault((row.scheme, row.receiver), []).append(row)

    fig, ax = plt.subplots(figsize=(7.0, 5.0))
    for scheme, receiver in sorted(groups):
        curve = groups[(scheme, receiver)]
        xs = [r.snr_db for r in curve]
        ys = [
            r.error_rate if r.error_rate > 0 else 1.0 / (10.0 * r.trials)
            for r in curve
        ]
        label = f"{scheme} R{receiver}"
        if any(r.error_rate == 0 for r in curve):
            label += " (0 clipped to 1/(10*trials))"
        ax.plot(xs, ys, marker="o", label=label)
    ax.set_yscale("log")
    ax.set_xlabel("Es/N0 (dB)")
    ax.set_ylabel("wanted-message error rate")
    ax.grid(True, which="both", linestyle=":")
    ax.legend(fontsize=8)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    return fig


def render(spec: PlotSpec) -> str:
    """Read every input, build the figure and write the image file."""
    rows: list[ResultRow] = []
    for path in spec.inputs:
        rows.extend(read_results(path))
    fig = build_figure(rows, spec.title, spec.schemes, spec.receivers)
    # Fixed hash salt and no date metadata keep SVG output byte-stable.
    with plt.rc_context({"svg.hashsalt": "ber-plots"}):
        if spec.output.lower().endswith(".svg"):
            fig.savefig(spec.output, metadata={"Date": None})
        else:
            fig.savefig(spec.output, dpi=150)
    plt.close(fig)
    return spec.output
