"""Alignment CSV parsing and phone-segment extraction.

Interchange format: UTF-8 CSV with header `start,end,phone`, decimal
seconds, one segment per row. Any forced aligner's output converts to
this in a line of scripting.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

from .audio import AudioClip
from .errors import ParseError, RangeError

HEADER = ["start", "end", "phone"]


@dataclass(frozen=True)
class SegmentAnnotation:
    start: float
    end: float
    phone: str


def _round_half_up(x: float) -> int:
    # floor(x + 0.5): avoids banker's rounding so segment lengths are stable
    return int(math.floor(x + 0.5))


def parse_alignment(text: str) -> list[SegmentAnnotation]:
    """Parse alignment CSV content into annotations, in file order."""
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or [c.strip() for c in rows[0]] != HEADER:
        raise ParseError(f"expected header {','.join(HEADER)}", line=1)
    annotations = []
    for i, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != 3:
            raise ParseError(f"expected 3 fields, got {len(row)}", line=i)
        try:
            start = float(row[0])
            end = float(row[1])
        except ValueError as exc:
            raise ParseError(f"bad number: {exc}", line=i) from None
        phone = row[2].strip()
        if not phone:
            raise ParseError("empty phone label", line=i)
        if start < 0:
            raise ParseError(f"negative start {start}", line=i)
        if start >= end:
            raise ParseError(f"start {start} must precede end {end}", line=i)
        annotations.append(SegmentAnnotation(start, end, phone))
    return annotations


def extract_segments(
    clip: AudioClip, annotations: list[SegmentAnnotation], keep: set[str]
) -> list[AudioClip]:
    """Cut one labeled clip per annotation whose phone is in `keep`.

    Segment length is round((end-start)*sr) samples starting at
    round(start*sr), so lengths depend only on the annotated duration.
    """
    sr = clip.sample_rate
    out = []
    for ann in annotations:
        first = _round_half_up(ann.start * sr)
        length = _round_half_up((ann.end - ann.start) * sr)
        if first + length > clip.samples.size:
            raise RangeError(
                f"annotation ({ann.start}, {ann.end}, {ann.phone}) exceeds clip "
                f"length {clip.samples.size / sr:.3f}s"
            )
        if length < 1:
            raise RangeError(
                f"annotation ({ann.start}, {ann.end}, {ann.phone}) is shorter "
                "than one sample"
            )
        if ann.phone not in keep:
            continue
        out.append(
            AudioClip(
                clip.samples[first : first + length],
                sr,
                label=ann.phone,
                source_id=f"{clip.source_id}[{ann.start}:{ann.end}]",
            )
        )
    return out
