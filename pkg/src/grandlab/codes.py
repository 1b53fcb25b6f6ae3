"""Binary linear block codes: eBCH, extended Hamming, PAC and file-defined codes."""
from __future__ import annotations

import math
import os
import tempfile
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np
from scipy.optimize import brentq

from .gf2 import (
    BitMatrix,
    BitVec,
    GF2Error,
    format_matrix,
    independent_rows,
    nullspace,
    parse_alist,
    parse_matrix,
    rank,
)


class CodeError(ValueError):
    pass


@dataclass(frozen=True)
class LinearCode:
    n: int
    k: int
    G: BitMatrix
    H: BitMatrix
    name: str = "code"
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.G.shape != (self.k, self.n):
            raise CodeError(f"G has shape {self.G.shape}, expected {(self.k, self.n)}")
        if self.H.shape != (self.n - self.k, self.n):
            raise CodeError(f"H has shape {self.H.shape}, expected {(self.n - self.k, self.n)}")
        if rank(self.G) != self.k:
            raise CodeError("G is rank deficient")
        if rank(self.H) != self.n - self.k:
            raise CodeError("H is rank deficient")
        if not self.G.mul_transpose(self.H).is_zero():
            raise CodeError("G H^T != 0")

    @property
    def rate(self) -> float:
        return self.k / self.n

    @classmethod
    def from_H(cls, H: BitMatrix, name="code", **meta) -> "LinearCode":
        G = nullspace(H)
        return cls(H.ncols, G.nrows, G, H, name, meta)

    @classmethod
    def from_G(cls, G: BitMatrix, name="code", **meta) -> "LinearCode":
        H = nullspace(G)
        return cls(G.ncols, G.nrows, G, H, name, meta)


def encode(code: LinearCode, msg: BitVec) -> BitVec:
    if msg.length != code.k:
        raise CodeError(f"message length {msg.length} != k={code.k}")
    word = 0
    m = msg.word
    i = 0
    while m:
        if m & 1:
            word ^= code.G.rows[i]
        m >>= 1
        i += 1
    return BitVec(word, code.n)


def codewords(code: LinearCode):
    """All 2^k codewords as ints, in message order (small k only)."""
    if code.k > 22:
        raise CodeError(f"k={code.k} too large to enumerate")
    words = [0]
    for g in code.G.rows:
        # doubling keeps index == message integer (bit i of msg selects row i)
        words += [w ^ g for w in words]
    return words


# --- GF(2^m) ----------------------------------------------------------------

class Gf2mField:
    """GF(2^m) defined by a primitive polynomial given as a bitmask."""

    def __init__(self, poly: int):
        m = poly.bit_length() - 1
        if m < 2:
            raise CodeError(f"polynomial {poly:#x} has degree < 2")
        self.m = m
        self.poly = poly
        self.order = (1 << m) - 1
        exp = [0] * (2 * self.order)
        log = [-1] * (1 << m)
        x = 1
        for i in range(self.order):
            if x == 1 and i > 0:
                raise CodeError(f"polynomial {poly:#x} is not primitive (ord(alpha)={i})")
            exp[i] = x
            log[x] = i
            x <<= 1
            if x >> m:
                x ^= poly
        if x != 1:
            raise CodeError(f"polynomial {poly:#x} is not primitive")
        for i in range(self.order, 2 * self.order):
            exp[i] = exp[i - self.order]
        self.exp = exp
        self.log = log

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self.exp[self.log[a] + self.log[b]]

    def alpha_pow(self, i: int) -> int:
        return self.exp[i % self.order]

    def coset(self, i: int) -> list[int]:
        out = []
        j = i % self.order
        while j not in out:
            out.append(j)
            j = (2 * j) % self.order
        return out

    def minimal_poly(self, i: int) -> int:
        """Minimal polynomial of alpha^i over GF(2), as a bitmask."""
        coeffs = [1]  # field elements, lowest degree first
        for j in self.coset(i):
            root = self.alpha_pow(j)
            nxt = [0] * (len(coeffs) + 1)
            for d, c in enumerate(coeffs):
                nxt[d + 1] ^= c
                nxt[d] ^= self.mul(c, root)
            coeffs = nxt
        word = 0
        for d, c in enumerate(coeffs):
            if c not in (0, 1):
                raise AssertionError("minimal polynomial left GF(2)")
            word |= c << d
        return word


def _polymul2(a: int, b: int) -> int:
    out = 0
    while b:
        if b & 1:
            out ^= a
        a <<= 1
        b >>= 1
    return out


def ebch(m: int, t: int, poly: int) -> LinearCode:
    """Extended narrow-sense binary BCH code of length 2^m.

    Coordinates 1..2^m-1 carry the coefficients of x^0..x^(2^m-2); the
    overall parity bit sits at coordinate 2^m.  H starts with the all-ones
    row followed by the binary expansions of alpha^(i j), i = 1, 3, ...
    """
    if m < 3:
        raise CodeError("m must be >= 3")
    if not 1 <= t or t >= (1 << (m - 1)) / m:
        raise CodeError(f"designed t={t} out of range for m={m}")
    gf = Gf2mField(poly)
    if gf.m != m:
        raise CodeError(f"polynomial degree {gf.m} != m={m}")
    n0 = gf.order
    gen = 1
    seen: set[int] = set()
    reps = []
    for i in range(1, 2 * t, 2):
        if i % n0 in seen:
            continue
        cs = gf.coset(i)
        seen.update(cs)
        reps.append(i)
        gen = _polymul2(gen, gf.minimal_poly(i))
    deg = gen.bit_length() - 1
    k = n0 - deg
    if k <= 0:
        raise CodeError("degenerate code (k <= 0)")
    n = n0 + 1
    parity_bit = 1 << n0
    g_rows = []
    for i in range(k):
        w = gen << i
        if w.bit_count() & 1:
            w |= parity_bit
        g_rows.append(w)
    h_rows = [(1 << n) - 1]
    for i in reps:
        for b in range(m):
            w = 0
            for j in range(n0):
                if (gf.alpha_pow(i * j) >> b) & 1:
                    w |= 1 << j
            h_rows.append(w)
    H = independent_rows(BitMatrix(tuple(h_rows), n))
    G = BitMatrix(tuple(g_rows), n)
    return LinearCode(n, k, G, H, f"ebch{n}_{k}", {"m": m, "t": t, "poly": poly})


def extended_hamming(m: int) -> LinearCode:
    """(2^m, 2^m - m - 1) extended Hamming code, d_min = 4."""
    if m < 2:
        raise CodeError("m must be >= 2")
    n = 1 << m
    rows = [(1 << n) - 1]
    for b in range(m):
        w = 0
        for j in range(1, n):
            if (j >> b) & 1:
                w |= 1 << (j - 1)
        rows.append(w)
    H = BitMatrix(tuple(rows), n)
    code = LinearCode.from_H(H, f"ehamming{n}_{n - m - 1}", m=m)
    return code


# --- PAC --------------------------------------------------------------------

def _phi(x: float) -> float:
    if x <= 0:
        return 1.0
    if x < 10:
        return math.exp(-0.4527 * x ** 0.86 + 0.0218)
    return math.sqrt(math.pi / x) * math.exp(-x / 4) * (1 - 10 / (7 * x))


def _phi_inv(y: float) -> float:
    if y >= 1.0:
        return 0.0
    hi = 1.0
    while _phi(hi) > y:
        hi *= 2
    return brentq(lambda x: _phi(x) - y, 0.0, hi, xtol=1e-12)


def ga_reliability(n: int, design_snr_db: float, rate: float) -> np.ndarray:
    """Mean LLR of each synthetic channel under the Gaussian approximation.

    Index ``i`` refers to row ``i`` of F^{(x) log2 n} (no bit reversal);
    bit ``b`` of ``i`` selects the check (0) or variable (1) combination at
    stage ``b``, least significant stage nearest the channel.
    """
    m = n.bit_length() - 1
    sigma2 = 1.0 / (2 * rate * 10 ** (design_snr_db / 10))
    mean = [2.0 / sigma2]
    for _ in range(m):
        nxt = []
        for z in mean:
            nxt.append(_phi_inv(1 - (1 - _phi(z)) ** 2))
        for z in mean:
            nxt.append(2 * z)
        mean = nxt
    return np.array(mean)


def rm_polar_profile(n: int, k: int, design_snr_db: float = 2.0) -> list[int]:
    """Information set (0-based row indices) of an RM-polar rate profile.

    Rows are taken by descending Hamming weight of their index; ties are
    broken by descending GA reliability, then by index.
    """
    rel = ga_reliability(n, design_snr_db, k / n)
    order = sorted(range(n), key=lambda i: (-bin(i).count("1"), -rel[i], i))
    return sorted(order[:k])


def _kron_power(n: int) -> list[int]:
    # row i of F^{(x)m}, F = [[1,0],[1,1]]: column j set iff j subset of i
    return [sum(1 << j for j in range(n) if (j & i) == j) for i in range(n)]


def pac(n: int, k: int, conv_poly, profile=None, design_snr_db: float = 2.0) -> LinearCode:
    """PAC code: rows of T F^{(x) log2 n} at the information set ``profile``."""
    if n < 2 or n & (n - 1):
        raise CodeError("n must be a power of two")
    if not 1 <= k <= n:
        raise CodeError("k must lie in [1, n]")
    if profile is None:
        profile = rm_polar_profile(n, k, design_snr_db)
    profile = sorted(profile)
    if len(profile) != k or len(set(profile)) != k:
        raise CodeError(f"profile size {len(profile)} != k={k}")
    conv = [int(c) for c in conv_poly]
    if not conv or conv[0] != 1:
        raise CodeError("convolutional polynomial must start with 1")
    F = _kron_power(n)
    g_rows = []
    for i in profile:
        # row i of T: t_{i,j} = conv[j - i] for j >= i
        w = 0
        for d, c in enumerate(conv):
            j = i + d
            if c and j < n:
                w ^= F[j]
        g_rows.append(w)
    G = BitMatrix(tuple(g_rows), n)
    return LinearCode.from_G(G, f"pac{n}_{k}", conv=conv, profile=profile)


# --- files ------------------------------------------------------------------

def save_code(code: LinearCode, path, kind: str = "H") -> None:
    if kind not in ("G", "H"):
        raise CodeError("kind must be 'G' or 'H'")
    m = code.H if kind == "H" else code.G
    text = format_matrix(m, f"# kind={kind} name={code.name}")
    atomic_write(path, text)


def load_code(path) -> LinearCode:
    path = Path(path)
    text = path.read_text()
    try:
        if path.suffix == ".alist":
            return LinearCode.from_H(parse_alist(text), path.stem)
        m, comments = parse_matrix(text)
    except GF2Error as exc:
        raise CodeError(f"{path}: {exc}") from exc
    kind, name = "H", path.stem
    for c in comments:
        for tok in c.lstrip("#").split():
            if tok.startswith("kind="):
                kind = tok[5:]
            elif tok.startswith("name="):
                name = tok[5:]
    if kind == "H":
        return LinearCode.from_H(m, name)
    if kind == "G":
        return LinearCode.from_G(m, name)
    raise CodeError(f"{path}: unknown kind {kind!r}")


def atomic_write(path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        umask = os.umask(0)
        os.umask(umask)
        os.chmod(tmp, 0o666 & ~umask)  # mkstemp creates 0600
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# --- registry ---------------------------------------------------------------

PAC_CONV = (1, 0, 1, 1, 0, 1, 1)

REGISTRY = {
    "ebch128_106": lambda: ebch(7, 3, 0b10001001),  # D^7 + D^3 + 1
    "ebch64_45": lambda: ebch(6, 3, 0b1000011),  # D^6 + D + 1
    "ebch32_21": lambda: ebch(5, 2, 0b100101),  # D^5 + D^2 + 1
    "ehamming8_4": lambda: extended_hamming(3),
    "ehamming16_11": lambda: extended_hamming(4),
    "pac64_44": lambda: pac(64, 44, PAC_CONV),
}


@lru_cache(maxsize=None)
def get_code(name: str) -> LinearCode:
    """Built-in code by registry name, or a code file path."""
    if name in REGISTRY:
        return REGISTRY[name]()
    if Path(name).exists():
        return load_code(name)
    raise CodeError(f"unknown code {name!r}; known: {', '.join(REGISTRY)}")
