"""Log-scale error-rate figures from icqam simulation CSVs."""

__version__ = "0.1.0"

from .render import PlotSpec, ResultRow, ResultsFormatError, build_figure, read_results, render  # noqa: F401
