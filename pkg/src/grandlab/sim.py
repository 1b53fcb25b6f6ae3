"""AWGN/BPSK Monte Carlo runs and the statistics around them.

Every trial draws from its own generator ``default_rng([seed, trial])``:
message bits first, then a standard normal noise vector that is scaled by
sigma.  Noise is therefore paired across decoders and SNR points, and the
result does not depend on how trials are split over worker processes.
"""
from __future__ import annotations

import csv
import io
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .codes import LinearCode, atomic_write, get_code
from .decode import Tuning
from .engine import BatchDecoder
from .segmentation import Segmentation, find_segments

DECODERS = ("orbgrand", "seg-orbgrand")
CSV_COLUMNS = (
    "code", "n", "k", "decoder", "segments", "ebno_db", "b", "trials",
    "block_errors", "miscorrections", "abandons", "bler", "avg_queries",
    "p50_queries", "p95_queries", "seed",
)


class ConfigError(ValueError):
    pass


def ebno_to_sigma(ebno_db: float, rate: float) -> float:
    if not 0 < rate <= 1:
        raise ValueError(f"rate must lie in (0, 1], got {rate}")
    return math.sqrt(1.0 / (2.0 * rate * 10 ** (ebno_db / 10)))


def awgn_bpsk(c, sigma: float, rng: np.random.Generator) -> np.ndarray:
    """BPSK (0 -> +1, 1 -> -1) plus i.i.d. N(0, sigma^2) noise."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    bits = np.asarray(c.to_array() if hasattr(c, "to_array") else c, dtype=float)
    return (1.0 - 2.0 * bits) + sigma * rng.standard_normal(bits.shape[0])


def bitonic_stages(n: int) -> int:
    """Stages of a bitonic sorter on ``n`` inputs: m(m+1)/2 with m = log2 n."""
    if n < 2 or n & (n - 1):
        raise ValueError(f"n must be a power of two >= 2, got {n}")
    m = n.bit_length() - 1
    return m * (m + 1) // 2


def wilson_interval(k: int, n: int, z: float = 1.959963984540054) -> tuple[float, float]:
    if n <= 0:
        return (0.0, 1.0)
    p = k / n
    den = 1 + z * z / n
    mid = (p + z * z / (2 * n)) / den
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / den
    lo = 0.0 if k == 0 else max(0.0, mid - half)
    hi = 1.0 if k == n else min(1.0, mid + half)
    return (lo, hi)


def parse_segments(spec: str) -> str | list[list[int]]:
    """``auto``, ``none`` or explicit sets like ``1,3,6/2,4,7/5,8``."""
    spec = spec.strip()
    if spec in ("auto", "none"):
        return spec
    try:
        sets = [[int(x) for x in part.split(",") if x.strip()] for part in spec.split("/")]
    except ValueError as exc:
        raise ConfigError(f"bad segment list {spec!r}") from exc
    if not all(sets):
        raise ConfigError(f"empty segment in {spec!r}")
    return sets


@dataclass(frozen=True)
class TrialConfig:
    code: str = "ebch128_106"
    decoders: tuple[str, ...] = ("orbgrand", "seg-orbgrand")
    segments: str = "auto"
    max_p: int = 3
    ebno: tuple[float, ...] = (5.0,)
    b: int = 100_000
    trials: int = 1000
    seed: int = 0
    tuning: tuple[float, float] | None = None  # (eps, rho)
    min_errors: int = 0
    max_trials: int | None = None
    threads: int | None = None

    def validate(self) -> None:
        for d in self.decoders:
            if d not in DECODERS:
                raise ConfigError(f"unknown decoder {d!r}; choose from {DECODERS}")
        if not self.decoders:
            raise ConfigError("at least one decoder is required")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.b < 1:
            raise ConfigError("b must be >= 1")
        if not self.ebno or not all(math.isfinite(e) for e in self.ebno):
            raise ConfigError("Eb/N0 values must be finite")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must fit in 64 bits")
        if self.max_p < 1:
            raise ConfigError("max_p must be >= 1")
        if self.max_trials is not None and self.max_trials < self.trials:
            raise ConfigError("max_trials must be >= trials")
        if self.tuning is not None:
            eps, rho = self.tuning
            if eps <= 0 or rho <= 0:
                raise ConfigError("tuning needs eps > 0 and rho > 0")
        if self.threads is not None and self.threads < 1:
            raise ConfigError("threads must be >= 1")
        parse_segments(self.segments)


@dataclass
class SimRow:
    code: str
    n: int
    k: int
    decoder: str
    segments: str
    ebno_db: float
    b: int
    seed: int
    queries: np.ndarray
    status: np.ndarray  # 0 correct, 1 miscorrection, 2 abandoned
    wall_time: float = 0.0

    @property
    def trials(self) -> int:
        return int(self.queries.size)

    @property
    def miscorrections(self) -> int:
        return int(np.count_nonzero(self.status == 1))

    @property
    def abandons(self) -> int:
        return int(np.count_nonzero(self.status == 2))

    @property
    def block_errors(self) -> int:
        return self.miscorrections + self.abandons

    @property
    def bler(self) -> float:
        return self.block_errors / self.trials

    @property
    def bler_ci(self) -> tuple[float, float]:
        return wilson_interval(self.block_errors, self.trials)

    @property
    def avg_queries(self) -> float:
        return float(self.queries.mean())

    def percentile(self, q: float) -> float:
        return float(np.percentile(self.queries, q, method="lower"))

    def record(self) -> dict:
        return {
            "code": self.code, "n": self.n, "k": self.k, "decoder": self.decoder,
            "segments": self.segments, "ebno_db": f"{self.ebno_db:g}", "b": self.b,
            "trials": self.trials, "block_errors": self.block_errors,
            "miscorrections": self.miscorrections, "abandons": self.abandons,
            "bler": f"{self.bler:.6e}", "avg_queries": f"{self.avg_queries:.4f}",
            "p50_queries": f"{self.percentile(50):g}",
            "p95_queries": f"{self.percentile(95):g}", "seed": self.seed,
        }


@dataclass
class SimReport:
    config: TrialConfig
    rows: list[SimRow] = field(default_factory=list)

    def row(self, decoder: str, ebno: float) -> SimRow:
        for r in self.rows:
            if r.decoder.split("[")[0] == decoder and r.ebno_db == ebno:
                return r
        raise KeyError((decoder, ebno))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
        w.writeheader()
        for r in self.rows:
            w.writerow(r.record())
        return buf.getvalue()

    def write_csv(self, path) -> None:
        atomic_write(path, self.to_csv())


# --- trial execution ------------------------------------------------------------

def resolve_segmentation(code: LinearCode, segments, max_p: int = 3) -> Segmentation:
    if segments == "auto":
        return find_segments(code.H, max_p=max_p)
    if segments == "none":
        return Segmentation.trivial(code.n)
    return Segmentation.from_sets(code.H, segments)


def resolve_threads(threads: int | None) -> int:
    if threads is not None:
        return threads
    env = os.environ.get("GRANDLAB_THREADS")
    if env:
        try:
            v = int(env)
        except ValueError as exc:
            raise ConfigError(f"GRANDLAB_THREADS must be an integer, got {env!r}") from exc
        if v < 1:
            raise ConfigError("GRANDLAB_THREADS must be >= 1")
        return v
    return os.cpu_count() or 1


def trial_word(G: np.ndarray, seed: int, trial: int, sigma: float):
    """Transmitted codeword and received vector for one trial."""
    rng = np.random.default_rng([seed, trial])
    msg = rng.integers(0, 2, size=G.shape[0], dtype=np.uint8)
    c = (msg @ G) & 1
    r = (1.0 - 2.0 * c) + sigma * rng.standard_normal(G.shape[1])
    return c.astype(bool), r


_WORKER_CACHE: dict = {}


def _decoder_for(code_name, decoder, seg_key, max_p, tuning, sigma):
    key = (code_name, decoder, seg_key, max_p, tuning, sigma if tuning else None)
    eng = _WORKER_CACHE.get(key)
    if eng is None:
        code = get_code(code_name)
        if decoder == "orbgrand":
            eng = BatchDecoder(code)
        else:
            segs = seg_key if isinstance(seg_key, str) else [list(s) for s in seg_key]
            seg = resolve_segmentation(code, segs, max_p)
            tun = Tuning(tuning[0], tuning[1], sigma) if tuning else None
            eng = BatchDecoder(code, seg, tun)
        if len(_WORKER_CACHE) > 16:
            _WORKER_CACHE.clear()
        _WORKER_CACHE[key] = eng
    return eng


def _run_chunk(args):
    code_name, decoder, seg_key, max_p, tuning, sigma, b, seed, start, stop = args
    eng = _decoder_for(code_name, decoder, seg_key, max_p, tuning, sigma)
    G = eng.code.G.to_array().astype(np.uint8)
    q = np.zeros(stop - start, dtype=np.int64)
    st = np.zeros(stop - start, dtype=np.int8)
    for i, t in enumerate(range(start, stop)):
        c, r = trial_word(G, seed, t, sigma)
        queries, coords, _ = eng.decode_raw(r, b)
        q[i] = queries
        if coords is None:
            st[i] = 2
            continue
        est = r < 0
        est[coords] ^= True
        if not np.array_equal(est, c):
            st[i] = 1
    return q, st


def _chunks(start: int, stop: int, parts: int) -> list[tuple[int, int]]:
    size = max(1, math.ceil((stop - start) / parts))
    return [(a, min(a + size, stop)) for a in range(start, stop, size)]


def run_trials(cfg: TrialConfig, progress=None) -> SimReport:
    """Simulate every (decoder, Eb/N0) pair of ``cfg``.

    With ``min_errors > 0`` a point keeps doubling its trial count until it
    has that many block errors or reaches ``max_trials``.
    """
    cfg.validate()
    code = get_code(cfg.code)
    segs = parse_segments(cfg.segments)
    seg_key = segs if isinstance(segs, str) else tuple(tuple(s) for s in segs)
    threads = resolve_threads(cfg.threads)
    cap = cfg.max_trials or cfg.trials
    report = SimReport(cfg)
    pool = ProcessPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        for decoder in cfg.decoders:
            if decoder == "orbgrand":
                seg_label = "none"
            else:
                seg = resolve_segmentation(code, segs, cfg.max_p)
                name = cfg.segments if isinstance(segs, str) else "explicit"
                seg_label = f"{name}:" + "/".join(map(str, seg.lengths))
            label = decoder
            tuning = cfg.tuning if decoder == "seg-orbgrand" else None
            if tuning:
                label += f"[eps={tuning[0]:g};rho={tuning[1]:g}]"
            for ebno in cfg.ebno:
                sigma = ebno_to_sigma(ebno, code.rate)
                t0 = time.perf_counter()
                qs, sts = [], []
                done, target = 0, cfg.trials
                while True:
                    jobs = [
                        (cfg.code, decoder, seg_key, cfg.max_p, tuning, sigma, cfg.b, cfg.seed, a, z)
                        for a, z in _chunks(done, target, threads * 4 if pool else 1)
                    ]
                    outs = pool.map(_run_chunk, jobs) if pool else map(_run_chunk, jobs)
                    for q, st in outs:
                        qs.append(q)
                        sts.append(st)
                    done = target
                    errors = sum(int(np.count_nonzero(s)) for s in sts)
                    if errors >= cfg.min_errors or done >= cap:
                        break
                    target = min(cap, 2 * done)
                row = SimRow(
                    cfg.code, code.n, code.k, label, seg_label, ebno, cfg.b, cfg.seed,
                    np.concatenate(qs), np.concatenate(sts), time.perf_counter() - t0,
                )
                report.rows.append(row)
                if progress is not None:
                    progress(row)
    finally:
        if pool is not None:
            pool.shutdown()
    return report


# --- statistics -----------------------------------------------------------------

@dataclass
class SegmentStats:
    counts: np.ndarray  # (trials, p) least-reliable coordinates per segment

    @property
    def mean(self) -> np.ndarray:
        return self.counts.mean(axis=0)

    @property
    def std(self) -> np.ndarray:
        return self.counts.std(axis=0)

    def histogram(self, j: int) -> dict[int, int]:
        vals, freq = np.unique(self.counts[:, j], return_counts=True)
        return {int(v): int(f) for v, f in zip(vals, freq)}


def segment_reliability_stats(code: LinearCode, seg: Segmentation, sigma: float,
                              trials: int, seed: int = 0) -> SegmentStats:
    """Per trial, how many of the n/2 least reliable coordinates land in each segment."""
    G = code.G.to_array().astype(np.uint8)
    member = np.zeros(code.n, dtype=np.int64)
    for j, s in enumerate(seg.sets):
        member[np.array(s) - 1] = j
    half = code.n // 2
    out = np.zeros((trials, seg.p), dtype=np.int64)
    for t in range(trials):
        _, r = trial_word(G, seed, t, sigma)
        low = np.argsort(np.abs(r), kind="stable")[:half]
        out[t] = np.bincount(member[low], minlength=seg.p)
    return SegmentStats(out)


@dataclass
class QueryHistogram:
    edges: np.ndarray
    freq: np.ndarray  # relative frequency per bin
    threshold: int
    frac_above: float


def query_histogram(queries, threshold: int = 100, edges=None) -> QueryHistogram:
    """Relative frequency of queries-to-first-codeword and the tail mass above ``threshold``."""
    q = np.asarray(queries)
    if edges is None:
        top = max(int(q.max()) + 1, 2)
        edges = np.unique(np.concatenate([[0, 1], np.geomspace(1, top, 40).round()]))
    counts, edges = np.histogram(q, bins=edges)
    return QueryHistogram(edges, counts / max(q.size, 1), threshold, float(np.mean(q > threshold)))


def plot_report(report: SimReport, path) -> None:
    """BLER and average queries against Eb/N0 on log axes, saved as SVG."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    for dec in dict.fromkeys(r.decoder for r in report.rows):
        rows = [r for r in report.rows if r.decoder == dec]
        x = [r.ebno_db for r in rows]
        ax1.semilogy(x, [max(r.bler, 1e-12) for r in rows], "o-", label=dec)
        ax2.semilogy(x, [r.avg_queries for r in rows], "s-", label=dec)
    ax1.set(xlabel="Eb/N0 (dB)", ylabel="BLER", title=report.config.code)
    ax2.set(xlabel="Eb/N0 (dB)", ylabel="average queries")
    for ax in (ax1, ax2):
        ax.grid(True, which="both", alpha=0.3)
        ax.legend()
    fig.tight_layout()
    buf = io.StringIO()
    fig.savefig(buf, format="svg", metadata={"Date": None})
    plt.close(fig)
    atomic_write(path, buf.getvalue())
