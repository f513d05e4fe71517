"""Local document retrieval for site hazard values.

The hazard data ships twice from one source: a CSV table (one row per city)
and a rendered text corpus chunked for lexical retrieval. Lookup retrieves
the top-k chunks for the location query by token-bag overlap, then parses the
six hazard values out of the matching chunk. No network, no embeddings; the
ranking is a deterministic tf-weighted overlap score.
"""

from __future__ import annotations

import csv
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from .datafiles import data_path
from .errors import IndexBuildError, MalformedRow

FIELDS = ("Sa_02", "Sa_05", "Sa_10", "Sa_20", "PGA", "PGV")
CITY_NOT_FOUND_DOC = {"error": "City not found"}

_TOKEN_RE = re.compile(r"[a-z0-9]+")
_CITY_LINE_RE = re.compile(r"Seismic design data for (.+?)\.")
_VALUE_RES = {
    "Sa_02": re.compile(r"Sa\(0\.2\)\s*=\s*(-?[\d.]+)"),
    "Sa_05": re.compile(r"Sa\(0\.5\)\s*=\s*(-?[\d.]+)"),
    "Sa_10": re.compile(r"Sa\(1\.0\)\s*=\s*(-?[\d.]+)"),
    "Sa_20": re.compile(r"Sa\(2\.0\)\s*=\s*(-?[\d.]+)"),
    "PGA": re.compile(r"PGA\s*=\s*(-?[\d.]+)"),
    "PGV": re.compile(r"PGV\s*=\s*(-?[\d.]+)"),
}


@dataclass(frozen=True)
class SeismicParameters:
    Sa_02: float
    Sa_05: float
    Sa_10: float
    Sa_20: float
    PGA: float
    PGV: float

    def to_document(self) -> dict:
        return {f: getattr(self, f) for f in FIELDS}


@dataclass(frozen=True)
class CityNotFound:
    """Negative lookup result; serializes to the exact error document."""

    location: str

    def to_document(self) -> dict:
        return dict(CITY_NOT_FOUND_DOC)


def tokenize(text: str) -> Counter:
    """Lowercased alphanumeric token bag."""
    return Counter(_TOKEN_RE.findall(text.lower()))


@dataclass(frozen=True)
class DocumentChunk:
    chunk_id: int
    text: str
    source: str
    tokens: Counter = field(compare=False)


@dataclass(frozen=True)
class ChunkIndex:
    chunks: tuple[DocumentChunk, ...]
    source: str


def _split_oversize(paragraph: str, max_chars: int) -> list[str]:
    if len(paragraph) <= max_chars:
        return [paragraph]
    pieces = math.ceil(len(paragraph) / max_chars)
    size = math.ceil(len(paragraph) / pieces)
    return [paragraph[i:i + size] for i in range(0, len(paragraph), size)]


def build_index(doc_text: str, source: str = "seismic_doc",
                max_chars: int = 800) -> ChunkIndex:
    """Chunk a document on blank lines (oversize paragraphs split evenly)
    and index token bags. Raises IndexBuildError on an empty document."""
    if not doc_text or not doc_text.strip():
        raise IndexBuildError("document is empty, nothing to index")
    paragraphs = [p.strip() for p in re.split(r"\n\s*\n", doc_text) if p.strip()]
    chunks: list[DocumentChunk] = []
    for para in paragraphs:
        for piece in _split_oversize(para, max_chars):
            chunks.append(DocumentChunk(chunk_id=len(chunks), text=piece,
                                        source=source, tokens=tokenize(piece)))
    return ChunkIndex(chunks=tuple(chunks), source=source)


def retrieve(index: ChunkIndex, query: str, k: int = 6) -> list[tuple[DocumentChunk, float]]:
    """Top-k chunks by tf-weighted token overlap.

    score(chunk) = sum_t min(tf_query(t), tf_chunk(t)) / |query tokens|,
    so a query equal to a chunk's text scores exactly 1.0 on it. Ties break
    by ascending chunk id; scores are unaffected by chunk order.
    """
    q = tokenize(query)
    q_len = sum(q.values())
    if q_len == 0:
        return []
    scored = []
    for chunk in index.chunks:
        overlap = sum(min(cnt, chunk.tokens[tok]) for tok, cnt in q.items())
        scored.append((chunk, overlap / q_len))
    scored.sort(key=lambda cs: (-cs[1], cs[0].chunk_id))
    return scored[:max(0, k)]


def normalize_city(name: str) -> str:
    return re.sub(r"\s+", " ", name.strip().lower().replace(",", " ")).strip()


def load_table(path: str | Path) -> list[dict]:
    """Rows of the hazard CSV as {'city': str, <field>: float}. Comment lines
    starting with '#' are skipped. A row missing or failing to parse a field
    raises MalformedRow naming the field."""
    text = Path(path).read_text(encoding="utf-8")
    lines = [ln for ln in text.splitlines() if not ln.lstrip().startswith("#")]
    rows = []
    for raw in csv.DictReader(lines):
        city = (raw.get("city") or "").strip()
        if not city:
            raise MalformedRow("row missing field: city")
        row: dict = {"city": city}
        for fieldname in FIELDS:
            value = (raw.get(fieldname) or "").strip()
            if not value:
                raise MalformedRow(f"{city}: row missing field: {fieldname}")
            try:
                row[fieldname] = float(value)
            except ValueError as exc:
                raise MalformedRow(
                    f"{city}: field {fieldname} not numeric: {value!r}") from exc
        rows.append(row)
    return rows


def _fmt(value: float) -> str:
    return f"{value:g}"


def render_corpus(rows: list[dict]) -> str:
    """Render the retrieval corpus from table rows. One paragraph per city so
    each city lands in its own chunk; the wording is fixed so the CSV and the
    document can be regenerated and diffed."""
    parts = [
        "Site hazard reference for storage-rack seismic design. Each entry "
        "lists the 2%-in-50-year uniform hazard spectral accelerations at "
        "0.2 s, 0.5 s, 1.0 s, and 2.0 s periods (in g), the peak ground "
        "acceleration PGA (in g), and the peak ground velocity PGV (in m/s). "
        "Values are reproduced verbatim from the source records."
    ]
    for row in rows:
        parts.append(
            f"Seismic design data for {row['city']}. "
            f"Sa(0.2) = {_fmt(row['Sa_02'])} g, "
            f"Sa(0.5) = {_fmt(row['Sa_05'])} g, "
            f"Sa(1.0) = {_fmt(row['Sa_10'])} g, "
            f"Sa(2.0) = {_fmt(row['Sa_20'])} g, "
            f"PGA = {_fmt(row['PGA'])} g, "
            f"PGV = {_fmt(row['PGV'])} m/s."
        )
    return "\n\n".join(parts) + "\n"


def parse_chunk_values(chunk_text: str, city: str) -> SeismicParameters:
    """Six hazard values out of a rendered chunk. MalformedRow names the
    first missing field."""
    values = {}
    for fieldname, rx in _VALUE_RES.items():
        m = rx.search(chunk_text)
        if not m:
            raise MalformedRow(f"{city}: row missing field: {fieldname}")
        values[fieldname] = float(m.group(1))
    return SeismicParameters(**values)


class SeismicDatabase:
    """Hazard lookup over the shipped (or an alternate) table + corpus."""

    def __init__(self, table_path: str | Path | None = None,
                 doc_text: str | None = None):
        self.table_path = Path(table_path) if table_path else data_path("seismic_table.csv")
        self.rows = load_table(self.table_path)
        if doc_text is None:
            doc_text = render_corpus(self.rows)
        self.doc_text = doc_text
        self.index = build_index(doc_text)

    def lookup(self, location: str, k: int = 6):
        """SeismicParameters for the city, or CityNotFound. Matching is
        case-insensitive on the trimmed city name."""
        want = normalize_city(location)
        if not want:
            return CityNotFound(location=location)
        ranked = retrieve(self.index, location, k=k)
        for chunk, score in ranked:
            if score <= 0.0:
                break
            m = _CITY_LINE_RE.search(chunk.text)
            if m and normalize_city(m.group(1)) == want:
                return parse_chunk_values(chunk.text, m.group(1))
        return CityNotFound(location=location)


def get_seismic_parameters(location: str,
                           database: SeismicDatabase | None = None):
    """Module-level convenience over a default shipped database."""
    if database is None:
        database = SeismicDatabase()
    return database.lookup(location)
