"""Readers for generating data: Joe-Kuo direction numbers and lattice vectors."""
from __future__ import annotations

import os
import re
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np

from ..errors import CapacityError, ParseError

DEFAULT_SOBOL_FILE = "new-joe-kuo-6.21201.txt"
DEFAULT_LATTICE_FILE = "lattice-33002-1024-1048576.9125.txt"
NET_BITS = 32

_M_MAX_RE = re.compile(r"#\s*m_max\s*=\s*(\d+)")


def data_dir() -> Path:
    """Directory holding bundled generating data; ``QMC_DATA_DIR`` overrides it."""
    env = os.environ.get("QMC_DATA_DIR")
    if env:
        return Path(env)
    return Path(__file__).resolve().parent.parent / "data"


@dataclass(frozen=True)
class LatticeGenVector:
    h: np.ndarray
    m_max: int

    def __post_init__(self):
        h = np.asarray(self.h, dtype=np.uint64)
        object.__setattr__(self, "h", h)
        if not 1 <= self.m_max <= 53:
            raise ValueError(f"m_max must be in [1, 53], got {self.m_max}")
        if h.ndim != 1 or h.size == 0:
            raise ValueError("generating vector must be a non-empty 1-d sequence")
        if int(h.max()) >= 2**self.m_max:
            raise ValueError(f"generating vector components must be < 2^{self.m_max}")

    @property
    def dim(self):
        return self.h.size

    def take(self, d):
        if d > self.dim:
            raise CapacityError(f"lattice vector has {self.dim} components, {d} requested")
        return self.h[:d]


@dataclass(frozen=True)
class GeneratingMatrices:
    """Per-dimension generating-matrix columns of a base-2 digital net.

    ``columns[k, j]`` is column ``j`` of dimension ``k`` packed into a 32-bit
    word, most significant bit first.
    """

    columns: np.ndarray
    m_max: int = NET_BITS

    def __post_init__(self):
        cols = np.asarray(self.columns, dtype=np.uint64)
        object.__setattr__(self, "columns", cols)
        if not 1 <= self.m_max <= NET_BITS:
            raise ValueError(f"m_max must be in [1, {NET_BITS}]")
        if cols.ndim != 2 or cols.shape[1] != self.m_max:
            raise ValueError(f"columns must have shape (d, {self.m_max})")
        if np.any(cols >= 2**NET_BITS) or np.any(cols == 0):
            raise ValueError("columns must be nonzero 32-bit words")

    @property
    def dim(self):
        return self.columns.shape[0]

    def take(self, d):
        if d > self.dim:
            raise CapacityError(f"generating matrices cover {self.dim} dimensions, {d} requested")
        return self.columns[:d]


def direction_columns(s, a, m, m_max=NET_BITS):
    """Expand initial direction numbers ``m_1..m_s`` into ``m_max`` packed columns."""
    mm = list(m)
    for k in range(s, m_max):
        new = mm[k - s] ^ (mm[k - s] << s)
        for i in range(1, s):
            if (a >> (s - 1 - i)) & 1:
                new ^= mm[k - i] << i
        mm.append(new)
    return [mm[j] << (NET_BITS - 1 - j) for j in range(m_max)]


def _parse_rows(path, d_needed):
    rows = []
    prev = 1
    with open(path) as fh:
        header = fh.readline()
        if not header:
            raise ParseError("empty direction-number file", path, 1)
        for lineno, line in enumerate(fh, start=2):
            if d_needed is not None and prev >= d_needed:
                break
            parts = line.split()
            if not parts:
                continue
            try:
                fields = [int(p) for p in parts]
            except ValueError:
                raise ParseError(f"non-integer field in {line.strip()!r}", path, lineno) from None
            if len(fields) < 4:
                raise ParseError("row needs at least 'd s a m_1'", path, lineno)
            dim, s, a, m = fields[0], fields[1], fields[2], fields[3:]
            if dim != prev + 1:
                raise ParseError(f"dimension {dim} out of sequence (expected {prev + 1})", path, lineno)
            if s < 1 or len(m) != s:
                raise ParseError(f"degree {s} does not match {len(m)} direction numbers", path, lineno)
            if a < 0 or a >= 2 ** max(s - 1, 0):
                raise ParseError(f"polynomial coefficient code {a} invalid for degree {s}", path, lineno)
            for i, mi in enumerate(m, start=1):
                if mi % 2 == 0 or not 0 < mi < 2**i:
                    raise ParseError(f"m_{i}={mi} must be odd and below 2^{i}", path, lineno)
            rows.append((s, a, m))
            prev = dim
    return rows


@lru_cache(maxsize=16)
def _cached_matrices(path, d, m_max):
    rows = _parse_rows(path, d)
    have = len(rows) + 1
    if d is not None and have < d:
        raise CapacityError(f"{path} holds {have} dimensions, {d} requested")
    cols = [[1 << (NET_BITS - 1 - j) for j in range(m_max)]]
    for s, a, m in rows:
        cols.append(direction_columns(s, a, m, m_max))
    return GeneratingMatrices(np.array(cols, dtype=np.uint64), m_max)


def parse_direction_numbers(path=None, d=None, m_max=NET_BITS) -> GeneratingMatrices:
    """Read Joe-Kuo format direction numbers (``d s a m_1 .. m_s`` rows after one header line).

    Dimension 1 is the van der Corput identity matrix; dimension ``k >= 2`` is
    taken from the row with ``d == k``.  Only the first ``d`` dimensions are
    parsed when ``d`` is given.
    """
    path = Path(path) if path is not None else data_dir() / DEFAULT_SOBOL_FILE
    if not path.is_file():
        raise FileNotFoundError(f"direction-number file not found: {path}")
    return _cached_matrices(str(path.resolve()), d, m_max)


def parse_lattice_vector(path=None) -> LatticeGenVector:
    """Read a lattice generating vector: one integer per line, optional ``# m_max=K`` comment."""
    path = Path(path) if path is not None else data_dir() / DEFAULT_LATTICE_FILE
    if not path.is_file():
        raise FileNotFoundError(f"lattice vector file not found: {path}")
    h = []
    m_max = None
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            if text.startswith("#"):
                match = _M_MAX_RE.match(text)
                if match:
                    m_max = int(match.group(1))
                continue
            try:
                value = int(text)
            except ValueError:
                raise ParseError(f"expected an integer, got {text!r}", path, lineno) from None
            if value <= 0:
                raise ParseError(f"generating vector entries must be positive, got {value}", path, lineno)
            h.append(value)
    if not h:
        raise ParseError("lattice vector file contains no entries", path)
    if m_max is None:
        m_max = NET_BITS
    try:
        return LatticeGenVector(np.array(h, dtype=np.uint64), m_max)
    except ValueError as exc:
        raise ParseError(str(exc), path) from None


def default_lattice_vector():
    return parse_lattice_vector()


def default_sobol_matrices(d):
    return parse_direction_numbers(d=d)
