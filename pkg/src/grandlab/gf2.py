"""Dense GF(2) vectors and matrices.

Rows are packed into Python integers: bit ``i - 1`` of a row integer holds
coordinate ``i``.  All public functions speak 1-based coordinates, matching
the usual ``[1, n]`` convention for codeword positions.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


class GF2Error(ValueError):
    """Dimension mismatch, bad index or malformed matrix text."""


def _pack(bits: Iterable[int]) -> int:
    word = 0
    for i, b in enumerate(bits):
        if b & 1:
            word |= 1 << i
    return word


def _unpack(word: int, length: int) -> list[int]:
    return [(word >> i) & 1 for i in range(length)]


@dataclass(frozen=True)
class BitVec:
    """Binary vector of fixed length, packed into an int."""

    word: int
    length: int

    def __post_init__(self):
        if self.length < 0:
            raise GF2Error("negative length")
        if self.word < 0 or self.word >> self.length:
            raise GF2Error(f"word has bits beyond length {self.length}")

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "BitVec":
        bits = [int(b) for b in bits]
        for b in bits:
            if b not in (0, 1):
                raise GF2Error(f"non-binary entry {b!r}")
        return cls(_pack(bits), len(bits))

    @classmethod
    def from_support(cls, support: Iterable[int], length: int) -> "BitVec":
        word = 0
        for i in support:
            if not 1 <= i <= length:
                raise GF2Error(f"coordinate {i} outside [1, {length}]")
            word |= 1 << (i - 1)
        return cls(word, length)

    @classmethod
    def zeros(cls, length: int) -> "BitVec":
        return cls(0, length)

    def bits(self) -> list[int]:
        return _unpack(self.word, self.length)

    def to_array(self) -> np.ndarray:
        return np.array(self.bits(), dtype=np.uint8)

    def support(self) -> list[int]:
        """1-based coordinates of the nonzero entries."""
        out = []
        w = self.word
        while w:
            low = w & -w
            out.append(low.bit_length())
            w ^= low
        return out

    @property
    def weight(self) -> int:
        return self.word.bit_count()

    def __getitem__(self, i: int) -> int:
        if not 1 <= i <= self.length:
            raise GF2Error(f"coordinate {i} outside [1, {self.length}]")
        return (self.word >> (i - 1)) & 1

    def __len__(self) -> int:
        return self.length

    def __xor__(self, other: "BitVec") -> "BitVec":
        if other.length != self.length:
            raise GF2Error(f"length mismatch {self.length} vs {other.length}")
        return BitVec(self.word ^ other.word, self.length)

    def dot(self, other: "BitVec") -> int:
        if other.length != self.length:
            raise GF2Error(f"length mismatch {self.length} vs {other.length}")
        return (self.word & other.word).bit_count() & 1

    def to_hex(self) -> str:
        """Hex string of the bit sequence, coordinate 1 as the most significant bit."""
        ndigits = max(1, (self.length + 3) // 4)
        msb_first = int("".join(map(str, self.bits())) or "0", 2)
        msb_first <<= 4 * ndigits - self.length
        return f"{msb_first:0{ndigits}x}"

    def __str__(self) -> str:
        return "".join(map(str, self.bits()))


@dataclass(frozen=True)
class BitMatrix:
    """Immutable dense binary matrix; each row is a packed int."""

    rows: tuple[int, ...]
    ncols: int

    def __post_init__(self):
        limit = 1 << self.ncols
        for r in self.rows:
            if r < 0 or r >= limit:
                raise GF2Error(f"row has bits beyond {self.ncols} columns")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], ncols: int | None = None) -> "BitMatrix":
        rows = [list(r) for r in rows]
        if ncols is None:
            if not rows:
                raise GF2Error("cannot infer column count of an empty matrix")
            ncols = len(rows[0])
        for r in rows:
            if len(r) != ncols:
                raise GF2Error("all rows must have identical length")
        return cls(tuple(BitVec.from_bits(r).word for r in rows), ncols)

    @classmethod
    def from_array(cls, a) -> "BitMatrix":
        a = np.asarray(a)
        if a.ndim != 2:
            raise GF2Error("expected a 2-D array")
        return cls.from_rows((a & 1).tolist(), a.shape[1])

    @classmethod
    def from_vecs(cls, vecs: Sequence[BitVec], ncols: int | None = None) -> "BitMatrix":
        if ncols is None:
            ncols = vecs[0].length
        for v in vecs:
            if v.length != ncols:
                raise GF2Error("all rows must have identical length")
        return cls(tuple(v.word for v in vecs), ncols)

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls(tuple(1 << i for i in range(n)), n)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def row(self, j: int) -> BitVec:
        """Row ``j`` (1-based)."""
        if not 1 <= j <= self.nrows:
            raise GF2Error(f"row {j} outside [1, {self.nrows}]")
        return BitVec(self.rows[j - 1], self.ncols)

    def vecs(self) -> list[BitVec]:
        return [BitVec(r, self.ncols) for r in self.rows]

    def to_array(self) -> np.ndarray:
        out = np.zeros((self.nrows, self.ncols), dtype=np.uint8)
        for i, r in enumerate(self.rows):
            out[i] = _unpack(r, self.ncols)
        return out

    def transpose(self) -> "BitMatrix":
        cols = []
        for c in range(self.ncols):
            word = 0
            for i, r in enumerate(self.rows):
                if (r >> c) & 1:
                    word |= 1 << i
            cols.append(word)
        return BitMatrix(tuple(cols), self.nrows)

    def columns(self) -> list[int]:
        """Columns packed as ints (bit ``j - 1`` = row ``j``)."""
        return list(self.transpose().rows)

    def __matmul__(self, other: "BitMatrix") -> "BitMatrix":
        if self.ncols != other.nrows:
            raise GF2Error(f"shape mismatch {self.shape} @ {other.shape}")
        out = []
        for r in self.rows:
            acc = 0
            i = 0
            while r:
                if r & 1:
                    acc ^= other.rows[i]
                r >>= 1
                i += 1
            out.append(acc)
        return BitMatrix(tuple(out), other.ncols)

    def mul_transpose(self, other: "BitMatrix") -> "BitMatrix":
        """``self @ other.T`` without materialising the transpose."""
        if self.ncols != other.ncols:
            raise GF2Error(f"column mismatch {self.ncols} vs {other.ncols}")
        out = []
        for r in self.rows:
            word = 0
            for j, o in enumerate(other.rows):
                if (r & o).bit_count() & 1:
                    word |= 1 << j
            out.append(word)
        return BitMatrix(tuple(out), other.nrows)

    def is_zero(self) -> bool:
        return not any(self.rows)

    def stack(self, other: "BitMatrix") -> "BitMatrix":
        if self.ncols != other.ncols:
            raise GF2Error("column mismatch")
        return BitMatrix(self.rows + other.rows, self.ncols)

    def __str__(self) -> str:
        return "\n".join(str(v) for v in self.vecs())


def xor_rows(m: BitMatrix, dst: int, src: int) -> BitMatrix:
    """Replace row ``dst`` by ``dst ^ src`` (both 1-based)."""
    for j in (dst, src):
        if not 1 <= j <= m.nrows:
            raise GF2Error(f"row index {j} outside [1, {m.nrows}]")
    if dst == src:
        raise GF2Error("dst and src must differ")
    rows = list(m.rows)
    rows[dst - 1] ^= rows[src - 1]
    return BitMatrix(tuple(rows), m.ncols)


def syndrome(h: BitMatrix, v: BitVec) -> BitVec:
    """``H v^T`` over GF(2); bit ``j`` corresponds to row ``j`` of ``h``."""
    if v.length != h.ncols:
        raise GF2Error(f"vector length {v.length} != {h.ncols} columns")
    word = 0
    for j, r in enumerate(h.rows):
        if (r & v.word).bit_count() & 1:
            word |= 1 << j
    return BitVec(word, h.nrows)


def rref(m: BitMatrix) -> tuple[BitMatrix, list[int]]:
    """Reduced row echelon form with zero rows dropped.

    Pivots are chosen left to right; returns the pivot columns (1-based).
    """
    rows = [r for r in m.rows if r]
    pivots = []
    top = 0
    for c in range(m.ncols):
        bit = 1 << c
        sel = next((i for i in range(top, len(rows)) if rows[i] & bit), None)
        if sel is None:
            continue
        rows[top], rows[sel] = rows[sel], rows[top]
        p = rows[top]
        for i in range(len(rows)):
            if i != top and rows[i] & bit:
                rows[i] ^= p
        pivots.append(c + 1)
        top += 1
        if top == len(rows):
            break
    return BitMatrix(tuple(rows[:top]), m.ncols), pivots


def rank(m: BitMatrix) -> int:
    # xor basis keyed by leading bit; cheaper than a full rref
    basis: dict[int, int] = {}
    for r in m.rows:
        while r:
            lead = r.bit_length()
            if lead not in basis:
                basis[lead] = r
                break
            r ^= basis[lead]
    return len(basis)


def in_rowspace(m: BitMatrix, v: int | BitVec) -> bool:
    word = v.word if isinstance(v, BitVec) else v
    basis: dict[int, int] = {}
    for r in m.rows:
        while r:
            lead = r.bit_length()
            if lead not in basis:
                basis[lead] = r
                break
            r ^= basis[lead]
    while word:
        lead = word.bit_length()
        if lead not in basis:
            return False
        word ^= basis[lead]
    return True


def nullspace(m: BitMatrix) -> BitMatrix:
    """Basis (as rows) of ``{x : m x^T = 0}``; empty for full-rank square input."""
    red, pivots = rref(m)
    pivset = set(pivots)
    out = []
    for free in range(1, m.ncols + 1):
        if free in pivset:
            continue
        word = 1 << (free - 1)
        fbit = 1 << (free - 1)
        for r, p in zip(red.rows, pivots):
            if r & fbit:
                word |= 1 << (p - 1)
        out.append(word)
    return BitMatrix(tuple(out), m.ncols)


def independent_rows(m: BitMatrix) -> BitMatrix:
    """Keep rows that are not in the span of the rows kept before them."""
    basis: dict[int, int] = {}
    kept = []
    for r0 in m.rows:
        r = r0
        while r:
            lead = r.bit_length()
            if lead not in basis:
                basis[lead] = r
                kept.append(r0)
                break
            r ^= basis[lead]
    return BitMatrix(tuple(kept), m.ncols)


# --- text formats -----------------------------------------------------------

def format_matrix(m: BitMatrix, header: str | None = None) -> str:
    lines = []
    if header:
        lines.append(header if header.startswith("#") else "# " + header)
    lines.append(f"{m.nrows} {m.ncols}")
    lines.extend(str(v) for v in m.vecs())
    return "\n".join(lines) + "\n"


def parse_matrix(text: str) -> tuple[BitMatrix, list[str]]:
    """Parse the dense text format; returns the matrix and any comment lines."""
    comments = []
    body = []
    for line in text.splitlines():
        s = line.strip()
        if not s:
            continue
        if s.startswith("#"):
            comments.append(s)
        else:
            body.append(s)
    if not body:
        raise GF2Error("missing dimension header")
    head = body[0].split()
    if len(head) != 2 or not all(h.isdigit() for h in head):
        raise GF2Error(f"bad dimension header {body[0]!r}")
    nrows, ncols = int(head[0]), int(head[1])
    rows = body[1:]
    if len(rows) != nrows:
        raise GF2Error(f"header says {nrows} rows, found {len(rows)}")
    words = []
    for k, s in enumerate(rows, start=1):
        if len(s) != ncols or set(s) - {"0", "1"}:
            raise GF2Error(f"row {k}: expected {ncols} characters of 0/1")
        words.append(BitVec.from_bits(int(ch) for ch in s).word)
    return BitMatrix(tuple(words), ncols), comments


def parse_alist(text: str) -> BitMatrix:
    """Read an alist file (MacKay's sparse format) as a dense matrix.

    Only the header and the per-row column lists are used; the redundant
    column section is validated for consistency when present.
    """
    toks = [line.split() for line in text.splitlines() if line.strip()]
    try:
        ncols, nrows = int(toks[0][0]), int(toks[0][1])
        col_deg = [int(x) for x in toks[2]]
        row_deg = [int(x) for x in toks[3]]
        col_lists = toks[4:4 + ncols]
        row_lists = toks[4 + ncols:4 + ncols + nrows]
    except (IndexError, ValueError) as exc:
        raise GF2Error(f"malformed alist: {exc}") from exc
    if len(row_lists) != nrows or len(row_deg) != nrows or len(col_deg) != ncols:
        raise GF2Error("alist section sizes disagree with header")
    words = []
    for j, entries in enumerate(row_lists):
        idx = [int(x) for x in entries if int(x) != 0]
        if len(idx) != row_deg[j]:
            raise GF2Error(f"alist row {j + 1}: degree mismatch")
        words.append(BitVec.from_support(idx, ncols).word)
    m = BitMatrix(tuple(words), ncols)
    cols = m.columns()
    for c, entries in enumerate(col_lists):
        idx = {int(x) for x in entries if int(x) != 0}
        if idx != set(BitVec(cols[c], nrows).support()):
            raise GF2Error(f"alist column {c + 1} disagrees with row lists")
    return m


def read_matrix(path) -> tuple[BitMatrix, list[str]]:
    text = Path(path).read_text()
    if Path(path).suffix == ".alist":
        return parse_alist(text), []
    return parse_matrix(text)
