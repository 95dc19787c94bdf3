"""Masked Hamming matching, the IRDB template store, and score statistics.

Store layout (all integers little-endian)::

    b"IRDB"  u8 version=1  u32 record_count
    per record:
        u16 id_len, id bytes (UTF-8), i64 created_at,
        6 x f64 (pupil cx, cy, r, limbic cx, cy, r),
        u16 strip_rows, u16 strip_cols,
        256 code bytes, 256 mask bytes (MSB-first)
"""
from __future__ import annotations

import io
import logging
import os
import struct
import tempfile
import time
from dataclasses import dataclass

import numpy as np
from filelock import FileLock

from .config import DEFAULT_SHIFTS
from .encode import CODE_BITS, IrisCode, encode_iris, pack_code, unpack_code
from .errors import (
    BadLength,
    DuplicateId,
    EmptyInput,
    EmptyStore,
    InsufficientOverlap,
    IoFailure,
    StoreCorrupt,
    UnknownSubject,
)
from .localize import Boundaries, CircleParams
from .normalize import NormalizedIris

log = logging.getLogger(__name__)

MAGIC = b"IRDB"
VERSION = 1
DEFAULT_THRESHOLD = 0.35
DEFAULT_MIN_OVERLAP = 512
CODE_BYTES = CODE_BITS // 8


def hamming_distance(a: IrisCode, b: IrisCode, min_overlap: int = DEFAULT_MIN_OVERLAP) -> tuple[float, int]:
    """Fraction of disagreeing bits over the jointly valid positions."""
    if a.bits.size != b.bits.size:
        raise BadLength(f"code lengths differ: {a.bits.size} vs {b.bits.size}")
    both = a.mask & b.mask
    usable = int(np.count_nonzero(both))
    if usable < min_overlap or usable == 0:
        raise InsufficientOverlap(f"only {usable} usable bits (need {min_overlap})")
    disagree = int(np.count_nonzero((a.bits ^ b.bits) & both))
    return disagree / usable, usable


@dataclass(frozen=True)
class MatchResult:
    hd: float
    usable_bits: int
    best_shift: int
    threshold: float

    @property
    def accepted(self) -> bool:
        return self.hd <= self.threshold

    @property
    def decision(self) -> str:
        return "accept" if self.accepted else "reject"


def match_with_shifts(
    probe: NormalizedIris,
    gallery: IrisCode,
    shifts=DEFAULT_SHIFTS,
    threshold: float = DEFAULT_THRESHOLD,
    min_overlap: int = DEFAULT_MIN_OVERLAP,
) -> MatchResult:
    """Best (lowest) distance over candidate rotations of the probe.

    A shift ``s`` assumes the probe is rotated counterclockwise by ``s``
    strip columns relative to the gallery, so the probe strip is rolled by
    ``-s`` before encoding. Ties prefer the smallest ``|s|``, then the
    smaller ``s``.
    """
    shifts = list(shifts)
    if not shifts:
        raise ValueError("shift set is empty")
    if any(s % 4 for s in shifts):
        raise ValueError("shifts must be multiples of 4 columns")
    best = None
    for s in sorted(shifts, key=lambda s: (abs(s), s)):
        code = encode_iris(probe.rolled(-s), shift=s)
        try:
            hd, usable = hamming_distance(code, gallery, min_overlap)
        except InsufficientOverlap:
            continue
        if best is None or hd < best[0]:
            best = (hd, usable, s)
    if best is None:
        raise InsufficientOverlap("no shift leaves enough jointly valid bits")
    return MatchResult(best[0], best[1], best[2], threshold)


# ----------------------------------------------------------------- template store


@dataclass(frozen=True)
class TemplateRecord:
    subject_id: str
    code: IrisCode
    boundaries: Boundaries
    created_at: int = 0

    def __post_init__(self):
        if not self.subject_id:
            raise ValueError("subject_id must be non-empty")
        if len(self.subject_id.encode("utf-8")) > 0xFFFF:
            raise ValueError("subject_id is too long")
        if self.code.bits.size != CODE_BITS:
            raise BadLength(f"stored codes must be {CODE_BITS} bits")


_REC_FIXED = struct.Struct("<q6dHH")


def encode_record(rec: TemplateRecord) -> bytes:
    ident = rec.subject_id.encode("utf-8")
    p, l = rec.boundaries.pupil, rec.boundaries.limbic
    return (
        struct.pack("<H", len(ident))
        + ident
        + _REC_FIXED.pack(int(rec.created_at), p.cx, p.cy, p.r, l.cx, l.cy, l.r, rec.code.rows, rec.code.cols)
        + pack_code(rec.code)
    )


def encode_store(records) -> bytes:
    records = list(records)
    return MAGIC + struct.pack("<BI", VERSION, len(records)) + b"".join(encode_record(r) for r in records)


def decode_store(data: bytes) -> list[TemplateRecord]:
    buf = io.BytesIO(data)

    def take(n):
        chunk = buf.read(n)
        if len(chunk) != n:
            raise StoreCorrupt("template store is truncated")
        return chunk

    if take(4) != MAGIC:
        raise StoreCorrupt("not an IRDB template store")
    version, count = struct.unpack("<BI", take(5))
    if version != VERSION:
        raise StoreCorrupt(f"unsupported store version {version}")
    records = []
    for _ in range(count):
        (n,) = struct.unpack("<H", take(2))
        ident = take(n).decode("utf-8")
        created, pcx, pcy, pr, lcx, lcy, lr, rows, cols = _REC_FIXED.unpack(take(_REC_FIXED.size))
        code = unpack_code(take(2 * CODE_BYTES), CODE_BITS, rows, cols)
        bounds = Boundaries(CircleParams(pcx, pcy, pr), CircleParams(lcx, lcy, lr))
        records.append(TemplateRecord(ident, code, bounds, created))
    if buf.read(1):
        raise StoreCorrupt("trailing bytes after the last record")
    return records


def _lock(db_path) -> FileLock:
    return FileLock(os.fspath(db_path) + ".lock")


def read_store(db_path) -> list[TemplateRecord]:
    """All records, in file order. A missing store reads as empty."""
    try:
        with open(db_path, "rb") as fh:
            data = fh.read()
    except FileNotFoundError:
        return []
    except OSError as exc:
        raise IoFailure(f"cannot read store {db_path}: {exc}") from exc
    return decode_store(data)


def _write_store(db_path, records) -> None:
    payload = encode_store(records)
    directory = os.path.dirname(os.path.abspath(db_path))
    try:
        fd, tmp = tempfile.mkstemp(prefix=".irdb-", dir=directory)
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, db_path)
    except OSError as exc:
        raise IoFailure(f"cannot write store {db_path}: {exc}") from exc


def enroll(db_path, record: TemplateRecord, overwrite: bool = False) -> None:
    """Add ``record`` to the store, replacing an existing id only with ``overwrite``."""
    try:
        lock = _lock(db_path)
        lock.acquire()
    except OSError as exc:
        raise IoFailure(f"cannot lock store {db_path}: {exc}") from exc
    try:
        records = read_store(db_path)
        for i, existing in enumerate(records):
            if existing.subject_id == record.subject_id:
                if not overwrite:
                    raise DuplicateId(f"subject {record.subject_id!r} is already enrolled")
                records[i] = record
                break
        else:
            records.append(record)
        _write_store(db_path, records)
    finally:
        lock.release()


def load_record(db_path, subject_id: str) -> TemplateRecord:
    for rec in read_store(db_path):
        if rec.subject_id == subject_id:
            return rec
    raise UnknownSubject(f"subject {subject_id!r} is not enrolled")


def make_record(subject_id: str, code: IrisCode, boundaries: Boundaries, created_at: int | None = None) -> TemplateRecord:
    return TemplateRecord(subject_id, code, boundaries, int(time.time()) if created_at is None else created_at)


def verify(
    db_path,
    subject_id: str,
    probe: NormalizedIris,
    threshold: float = DEFAULT_THRESHOLD,
    shifts=DEFAULT_SHIFTS,
    min_overlap: int = DEFAULT_MIN_OVERLAP,
) -> MatchResult:
    rec = load_record(db_path, subject_id)
    return match_with_shifts(probe, rec.code, shifts, threshold, min_overlap)


def identify(
    db_path,
    probe: NormalizedIris,
    threshold: float = DEFAULT_THRESHOLD,
    shifts=DEFAULT_SHIFTS,
    min_overlap: int = DEFAULT_MIN_OVERLAP,
) -> list[tuple[str, MatchResult]]:
    """Every enrolled subject ranked by distance (ties by id)."""
    records = read_store(db_path)
    if not records:
        raise EmptyStore("template store is empty")
    ranked = []
    for rec in records:
        try:
            ranked.append((rec.subject_id, match_with_shifts(probe, rec.code, shifts, threshold, min_overlap)))
        except InsufficientOverlap:
            log.info("skipping %s: not enough overlapping bits", rec.subject_id)
    ranked.sort(key=lambda item: (item[1].hd, item[0]))
    return ranked


# ---------------------------------------------------------------- statistics

EVAL_THRESHOLDS = np.round(np.arange(1, 51) * 0.01, 2)


def decidability(genuine, imposter) -> float:
    """``|mu_imp - mu_gen| / sqrt((var_imp + var_gen) / 2)`` with population variances."""
    g = np.asarray(genuine, dtype=np.float64)
    i = np.asarray(imposter, dtype=np.float64)
    spread = np.sqrt((i.var() + g.var()) / 2.0)
    gap = abs(i.mean() - g.mean())
    if spread == 0:
        return float("inf") if gap > 0 else 0.0
    return float(gap / spread)


@dataclass(frozen=True)
class ScoreDistribution:
    genuine: np.ndarray
    imposter: np.ndarray
    thresholds: np.ndarray
    far: np.ndarray
    frr: np.ndarray
    dprime: float

    def to_csv(self) -> str:
        lines = ["threshold,far,frr"]
        lines += [f"{t:.2f},{a:.6f},{r:.6f}" for t, a, r in zip(self.thresholds, self.far, self.frr)]
        lines.append(f"# dprime={self.dprime!r}")
        return "\n".join(lines) + "\n"

    def rate_at(self, threshold: float) -> tuple[float, float]:
        """(FAR, FRR) at an arbitrary threshold."""
        far = float(np.mean(self.imposter <= threshold))
        frr = float(np.mean(self.genuine > threshold))
        return far, frr


def score_distribution(genuine_scores, imposter_scores, thresholds=EVAL_THRESHOLDS) -> ScoreDistribution:
    g = np.asarray(list(genuine_scores), dtype=np.float64)
    i = np.asarray(list(imposter_scores), dtype=np.float64)
    if g.size == 0 or i.size == 0:
        raise EmptyInput("need at least one genuine and one imposter score")
    t = np.asarray(thresholds, dtype=np.float64)
    far = (i[None, :] <= t[:, None]).mean(axis=1)
    frr = (g[None, :] > t[:, None]).mean(axis=1)
    return ScoreDistribution(g, i, t, far, frr, decidability(g, i))


def pair_score(a, b, shifts=DEFAULT_SHIFTS, min_overlap: int = DEFAULT_MIN_OVERLAP) -> float:
    """Distance for a (probe, gallery) pair of strips and/or codes."""
    if isinstance(b, NormalizedIris):
        b = encode_iris(b)
    if isinstance(a, NormalizedIris):
        return match_with_shifts(a, b, shifts, min_overlap=min_overlap).hd
    return hamming_distance(a, b, min_overlap)[0]


def evaluate(genuine_pairs, imposter_pairs, shifts=DEFAULT_SHIFTS, min_overlap: int = DEFAULT_MIN_OVERLAP) -> ScoreDistribution:
    genuine_pairs = list(genuine_pairs)
    imposter_pairs = list(imposter_pairs)
    if not genuine_pairs or not imposter_pairs:
        raise EmptyInput("need at least one genuine and one imposter pair")
    return score_distribution(
        [pair_score(a, b, shifts, min_overlap) for a, b in genuine_pairs],
        [pair_score(a, b, shifts, min_overlap) for a, b in imposter_pairs],
    )
