"""Experimental data ingestion and descriptive statistics.

The measurement files are plain CSV with a header naming the soil type
(ST), pore-water salinity (Mol), gravimetric moisture content (Moist),
dry unit weight (Uw) and the measured electrical resistivity (ER).
Empty fields and the literal token ``NA`` are missing values.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, ParseError, SchemaError, SummaryError

# The nine admissible soil mixtures and their additive fractions
# (bentonite fraction, sand fraction, pure-kaolin indicator).
SOIL_TYPES: dict[str, tuple[float, float, int]] = {
    "100%K": (0.0, 0.0, 1),
    "90%K+10%B": (0.10, 0.0, 0),
    "80%K+20%B": (0.20, 0.0, 0),
    "70%K+30%B": (0.30, 0.0, 0),
    "60%K+40%B": (0.40, 0.0, 0),
    "90%K+10%S": (0.0, 0.10, 0),
    "80%K+20%S": (0.0, 0.20, 0),
    "70%K+30%S": (0.0, 0.30, 0),
    "60%K+40%S": (0.0, 0.40, 0),
}

MISSING_TOKENS = {"", "na"}

# Accepted header spellings, lower-cased and stripped of separators.
_COLUMN_ALIASES = {
    "st": "st",
    "soiltype": "st",
    "soil": "st",
    "mol": "mol",
    "molarity": "mol",
    "moist": "moist",
    "moisture": "moist",
    "uw": "uw",
    "unitweight": "uw",
    "er": "er",
    "resistivity": "er",
}

_REQUIRED = ("st", "mol", "moist", "uw", "er")

# Column order used when summarizing and exporting.
SUMMARY_VARIABLES = (("Mol", "mol"), ("Moist", "moist"), ("Uw", "uw"), ("ER", "er"))


@dataclass(frozen=True)
class SoilRecord:
    """One experimental observation, possibly with missing measurements."""

    soil_type: str
    mol: float | None
    moist: float | None
    uw: float | None
    er: float | None


@dataclass(frozen=True)
class EncodedRecord:
    """A complete-case observation with the soil label expanded numerically.

    ``st_kb`` and ``st_ks`` are the bentonite and sand fractions in [0, 0.4]
    (at most one of them is positive); ``st_k`` is 1 for pure kaolin and 0
    otherwise.  ``er`` is None only when encoding covariates for prediction.
    """

    st_kb: float
    st_ks: float
    st_k: int
    mol: float
    moist: float
    uw: float
    er: float | None


@dataclass(frozen=True)
class VariableSummary:
    minimum: float
    q1: float
    median: float
    mean: float
    q3: float
    maximum: float
    n_missing: int


@dataclass(frozen=True)
class SummaryTable:
    """Per-variable descriptive statistics in dataset column order."""

    variables: dict[str, VariableSummary]

    _ROWS = (
        ("min", "minimum"),
        ("q1", "q1"),
        ("median", "median"),
        ("mean", "mean"),
        ("q3", "q3"),
        ("max", "maximum"),
        ("missing", "n_missing"),
    )

    def to_csv(self) -> str:
        """One row per statistic, one column per variable."""
        names = list(self.variables)
        lines = ["statistic," + ",".join(names)]
        for label, attr in self._ROWS:
            cells = [repr(getattr(self.variables[v], attr)) for v in names]
            lines.append(label + "," + ",".join(cells))
        return "\n".join(lines) + "\n"

    def __str__(self) -> str:
        names = list(self.variables)
        header = f"{'':>10}" + "".join(f"{v:>12}" for v in names)
        lines = [header]
        for label, attr in self._ROWS:
            cells = []
            for v in names:
                value = getattr(self.variables[v], attr)
                if attr == "n_missing":
                    cells.append(f"{value:>12d}")
                else:
                    cells.append(f"{value:>12.4f}")
            lines.append(f"{label:>10}" + "".join(cells))
        return "\n".join(lines)


@dataclass(frozen=True)
class Histogram:
    """Equal-width histogram; the maximum value falls in the last bin."""

    edges: tuple[float, ...]
    counts: tuple[int, ...]

    def to_csv(self) -> str:
        lines = ["bin_left,bin_right,count"]
        for i, count in enumerate(self.counts):
            lines.append(f"{self.edges[i]!r},{self.edges[i + 1]!r},{count}")
        return "\n".join(lines) + "\n"


def _normalize_header(name: str) -> str | None:
    key = "".join(ch for ch in name.lower() if ch.isalnum())
    return _COLUMN_ALIASES.get(key)


def _parse_number(token: str, column: str, row: int) -> float | None:
    text = token.strip()
    if text.lower() in MISSING_TOKENS:
        return None
    try:
        return float(text)
    except ValueError:
        raise ParseError(
            f"row {row}: non-numeric value {token!r} in column {column!r}"
        ) from None


def _open_source(source) -> io.TextIOBase:
    if isinstance(source, (str, Path)):
        return open(source, "r", encoding="utf-8", newline="")
    if isinstance(source, bytes):
        return io.StringIO(source.decode("utf-8"))
    if hasattr(source, "read"):
        data = source.read()
        if isinstance(data, bytes):
            data = data.decode("utf-8")
        return io.StringIO(data)
    raise TypeError(f"unsupported CSV source {type(source).__name__}")


def parse_csv(source) -> list[SoilRecord]:
    """Read soil measurements from a path, byte string or open file.

    Column names are matched case-insensitively and in any order; rows keep
    their file order.  Raises SchemaError when a required column is absent
    and ParseError for unknown soil labels or non-numeric tokens.
    """
    with _open_source(source) as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError("empty file: no header row") from None

        positions: dict[str, int] = {}
        for idx, name in enumerate(header):
            canonical = _normalize_header(name)
            if canonical is not None and canonical not in positions:
                positions[canonical] = idx
        missing = [c for c in _REQUIRED if c not in positions]
        if missing:
            raise SchemaError(f"missing required column(s): {', '.join(missing)}")

        records: list[SoilRecord] = []
        for row_number, row in enumerate(reader, start=1):
            if not row or all(not cell.strip() for cell in row):
                continue
            label = row[positions["st"]].strip()
            key = label.replace(" ", "").upper()
            if key not in SOIL_TYPES:
                raise ParseError(f"row {row_number}: unknown soil type label {label!r}")
            values = {
                col: _parse_number(row[positions[col]], col, row_number)
                for col in ("mol", "moist", "uw", "er")
            }
            if values["mol"] is not None and values["mol"] < 0:
                raise ParseError(f"row {row_number}: negative molarity {values['mol']}")
            if values["er"] is not None and values["er"] <= 0:
                raise ParseError(
                    f"row {row_number}: resistivity must be positive, got {values['er']}"
                )
            records.append(SoilRecord(soil_type=key, **values))
    return records


def soil_fractions(label: str) -> tuple[float, float, int]:
    """Map a soil label to (bentonite fraction, sand fraction, pure-kaolin flag)."""
    key = label.replace(" ", "").upper()
    try:
        return SOIL_TYPES[key]
    except KeyError:
        raise ParseError(f"unknown soil type label {label!r}") from None


def encode(
    records: Iterable[SoilRecord], require_response: bool = True
) -> list[EncodedRecord]:
    """Expand soil labels numerically and drop incomplete rows.

    Complete-case filtering is row-wise over mol, moist, uw and (unless
    ``require_response`` is False) er.
    """
    encoded: list[EncodedRecord] = []
    for rec in records:
        if rec.mol is None or rec.moist is None or rec.uw is None:
            continue
        if require_response and rec.er is None:
            continue
        kb, ks, k = soil_fractions(rec.soil_type)
        encoded.append(
            EncodedRecord(
                st_kb=kb,
                st_ks=ks,
                st_k=k,
                mol=rec.mol,
                moist=rec.moist,
                uw=rec.uw,
                er=rec.er,
            )
        )
    return encoded


def summarize(records: Sequence[SoilRecord]) -> SummaryTable:
    """Quartile summary of the numeric variables, with missing counts.

    Quartiles interpolate linearly between order statistics (the same
    convention as numpy's default percentile method).
    """
    table: dict[str, VariableSummary] = {}
    for display, attr in SUMMARY_VARIABLES:
        values = [getattr(r, attr) for r in records]
        present = np.array([v for v in values if v is not None], dtype=float)
        n_missing = len(values) - len(present)
        if len(present) == 0:
            raise SummaryError(f"variable {display!r} has no observed values")
        q1, med, q3 = np.percentile(present, [25.0, 50.0, 75.0])
        table[display] = VariableSummary(
            minimum=float(present.min()),
            q1=float(q1),
            median=float(med),
            mean=float(present.mean()),
            q3=float(q3),
            maximum=float(present.max()),
            n_missing=n_missing,
        )
    return SummaryTable(variables=table)


def histogram(values: Sequence[float], bin_count: int) -> Histogram:
    """Equal-width histogram over [min, max] with ``bin_count`` bins."""
    if bin_count < 1:
        raise DomainError(f"bin_count must be >= 1, got {bin_count}")
    data = np.asarray(list(values), dtype=float)
    data = data[np.isfinite(data)]
    if data.size == 0:
        raise DomainError("histogram requires at least one finite value")
    counts, edges = np.histogram(data, bins=bin_count, range=(data.min(), data.max()))
    return Histogram(edges=tuple(float(e) for e in edges), counts=tuple(int(c) for c in counts))


def sample_skewness(values: Sequence[float]) -> float:
    """Moment-based skewness m3 / m2^(3/2)."""
    data = np.asarray(list(values), dtype=float)
    data = data[np.isfinite(data)]
    if data.size < 2:
        raise DomainError("skewness requires at least two values")
    centered = data - data.mean()
    m2 = np.mean(centered**2)
    if m2 == 0:
        return 0.0
    return float(np.mean(centered**3) / m2**1.5)


def wenner_resistivity(a: float, v: float, i: float) -> float:
    """Four-electrode resistivity from spacing ``a``, voltage ``v``, current ``i``."""
    if a <= 0:
        raise DomainError(f"electrode spacing must be positive, got {a}")
    if i == 0:
        raise ZeroDivisionError("current must be non-zero")
    return 2.0 * math.pi * a * v / i


def soil_type_counts(records: Iterable[SoilRecord]) -> dict[str, int]:
    """Number of records per soil label, in canonical label order."""
    counts = {label: 0 for label in SOIL_TYPES}
    for rec in records:
        counts[rec.soil_type] += 1
    return counts


_ENCODED_COLUMNS = ("st_kb", "st_ks", "st_k", "mol", "moist", "uw", "er")


def write_encoded_csv(records: Iterable[EncodedRecord], target) -> None:
    """Serialize encoded records; float cells round-trip bit-for-bit."""
    own = isinstance(target, (str, Path))
    handle = open(target, "w", encoding="utf-8", newline="") if own else target
    try:
        handle.write(",".join(_ENCODED_COLUMNS) + "\n")
        for rec in records:
            cells = []
            for col in _ENCODED_COLUMNS:
                value = getattr(rec, col)
                cells.append("NA" if value is None else repr(value))
            handle.write(",".join(cells) + "\n")
    finally:
        if own:
            handle.close()


def read_encoded_csv(source) -> list[EncodedRecord]:
    """Inverse of :func:`write_encoded_csv`."""
    with _open_source(source) as handle:
        reader = csv.reader(handle)
        header = next(reader)
        if tuple(h.strip() for h in header) != _ENCODED_COLUMNS:
            raise SchemaError(f"unexpected encoded-CSV header: {header}")
        records = []
        for row_number, row in enumerate(reader, start=1):
            if not row:
                continue
            values = {
                col: _parse_number(row[i], col, row_number)
                for i, col in enumerate(_ENCODED_COLUMNS)
            }
            st_k = values.pop("st_k")
            records.append(EncodedRecord(st_k=int(st_k), **values))
    return records
