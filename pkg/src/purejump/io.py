"""CSV emission and ingestion with deterministic provenance headers.

Every output file starts with ``#`` comment lines carrying the tool version,
the full resolved configuration and the seed, so re-running the recorded
configuration reproduces the file byte-for-byte.  Floats are written with
``repr`` (shortest round-trip), never with timestamps.
"""

import numpy as np

from . import __version__
from .errors import DataError
from .simulate import DailySeries


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def provenance_lines(config: dict, seed) -> list[str]:
    items = " ".join(f"{k}={_fmt(v)}" for k, v in sorted(config.items()))
    return [
        f"# purejump {__version__}",
        f"# config: {items}",
        f"# seed: {_fmt(seed)}",
    ]


def write_table(path, header_lines, columns, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in header_lines:
            fh.write(line + "\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def write_report(path_or_none, header_lines, items: dict) -> str:
    """key=value report; returns the text, optionally writing it to a file."""
    lines = list(header_lines) + [f"{k}={_fmt(v)}" for k, v in items.items()]
    text = "\n".join(lines) + "\n"
    if path_or_none:
        with open(path_or_none, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return text


def write_series(path, series: DailySeries, header_lines) -> None:
    rows = zip(
        range(1, len(series) + 1),
        series.counts.tolist(),
        series.returns.tolist(),
        series.log_price.tolist(),
    )
    write_table(path, header_lines, ["day", "count", "return", "log_price"], rows)


def _read_columns(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = [ln for ln in fh if not ln.startswith("#")]
    except OSError as exc:
        raise DataError(f"cannot read series file {path}: {exc}") from None
    if not lines:
        raise DataError(f"{path}: empty series file")
    header = [name.strip() for name in lines[0].strip().split(",")]
    cols = {name: [] for name in header}
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.strip().split(",")
        if len(parts) != len(header):
            raise DataError(f"{path}:{lineno}: expected {len(header)} fields")
        for name, part in zip(header, parts):
            cols[name].append(part)
    return cols


def read_returns(path) -> np.ndarray:
    """Daily returns from any CSV carrying a ``return`` column."""
    cols = _read_columns(path)
    if "return" not in cols:
        raise DataError(f"{path}: need a 'return' column, got {sorted(cols)}")
    return np.array(cols["return"], dtype=float)


def read_series(path) -> DailySeries:
    """Read a simulate-format CSV; requires count and return columns.

    If a log_price column is present the exact increment identity is
    validated; otherwise prices are rebuilt by accumulation and returns are
    re-derived from them so the identity holds to the bit.
    """
    cols = _read_columns(path)
    header = sorted(cols)
    if "count" not in cols or "return" not in cols:
        raise DataError(f"{path}: need both 'count' and 'return' columns, got {header}")
    counts = np.array(cols["count"], dtype=np.int64)
    returns = np.array(cols["return"], dtype=float)
    if "log_price" in cols:
        log_price = np.array(cols["log_price"], dtype=float)
    else:
        log_price = np.cumsum(returns)
        returns = np.diff(log_price, prepend=0.0)
    try:
        return DailySeries(counts, returns, log_price)
    except ValueError as exc:
        raise DataError(f"{path}: {exc}") from None
