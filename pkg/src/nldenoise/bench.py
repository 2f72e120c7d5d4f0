"""Corrupt/filter/score benchmark over an image corpus.

The experiment per cell: decode the clean image, inject noise once per
(image, noise spec), run every filter and mask on that same corrupted
input, and score each restoration against the clean original. Per-job RNG
seeds are derived by hashing (master seed, image id, noise string), so
corpus order and scheduling cannot change any output byte.

Config files are flat ``key = value`` text with comma-separated lists::

    corpus  = imgs/a.pgm, imgs/b.ppm    # paths, relative to the config file
    noise   = sp:0.5, gaussian:0.5      # kind:param[:seed]
    filters = mean, median, cmf, vmf, smf, msmf:4
    masks   = 3                         # odd mask sides
    border  = replicate                 # replicate | reflect | zero
    seed    = 42                        # master seed
    peak    = 256                       # 255 | 256
    csv     = out/results.csv
    plot    = out/plot.txt
    workers = 1
    timing  = off                       # on: record wall_ms (breaks byte-determinism)

The CSV holds one row per (image, noise, filter, mask), sorted, then a
blank line, then the summary block. Means of PSNR and MSE are taken
independently per (noise, filter, mask); infinite-PSNR rows are left out
of mean_psnr and counted in the ``excluded`` column.
"""

from __future__ import annotations

import hashlib
import math
import time
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .filters import FilterId, apply_filter
from .image import Image, check_border, check_mask
from .metrics import check_peak, mse, psnr
from .noise import NoiseSpec, RngStream, apply_noise
from .pnm import read_pnm

_U64_MAX = 2**64


@dataclass
class BenchConfig:
    corpus: list[Path]
    noise_specs: list[NoiseSpec]
    filters: list[FilterId]
    mask_sizes: list[int] = field(default_factory=lambda: [3])
    border: str = "replicate"
    master_seed: int = 0
    peak: int = 256
    csv_path: Path = Path("bench.csv")
    plot_path: Path = Path("bench_plot.txt")
    workers: int = 1
    timing: bool = False

    def __post_init__(self) -> None:
        if not self.corpus:
            raise ValueError("corpus must not be empty")
        if not self.noise_specs:
            raise ValueError("noise list must not be empty")
        if not self.filters:
            raise ValueError("filter list must not be empty")
        if not self.mask_sizes:
            raise ValueError("mask list must not be empty")
        for k in self.mask_sizes:
            check_mask(k)
        check_border(self.border)
        check_peak(self.peak)
        if not 0 <= int(self.master_seed) < _U64_MAX:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.master_seed}")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")
        for f in self.filters:
            if f.kind == "msmf":
                for k in self.mask_sizes:
                    if f.t > k * k:
                        raise ValueError(f"msmf threshold {f.t} exceeds window size {k * k} for mask {k}")


@dataclass(frozen=True)
class ScoreRow:
    image_id: str
    noise: str
    filter: str
    mask: int
    mse: float
    psnr: float
    wall_ms: float


@dataclass(frozen=True)
class SummaryRow:
    noise: str
    filter: str
    mask: int
    mean_psnr: float
    mean_mse: float
    n: int
    excluded: int


@dataclass
class BenchResult:
    rows: list[ScoreRow]
    summary: list[SummaryRow]
    errors: list[str]


_CONFIG_KEYS = ("corpus", "noise", "filters", "masks", "border", "seed", "peak", "csv", "plot", "workers", "timing")


def _split_list(value: str) -> list[str]:
    return [item.strip() for item in value.split(",") if item.strip()]


def load_config(path) -> BenchConfig:
    """Parse the flat key = value config format described in the module docs."""
    path = Path(path)
    base = path.parent
    raw: dict[str, str] = {}
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        if "=" not in text:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, _, value = text.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _CONFIG_KEYS:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        if key in raw:
            raise ValueError(f"{path}:{lineno}: duplicate key {key!r}")
        raw[key] = value
    for required in ("corpus", "noise", "filters"):
        if required not in raw:
            raise ValueError(f"{path}: missing required key {required!r}")
    timing = raw.get("timing", "off")
    if timing not in ("on", "off"):
        raise ValueError(f"{path}: timing must be 'on' or 'off', got {timing!r}")
    return BenchConfig(
        corpus=[base / p for p in _split_list(raw["corpus"])],
        noise_specs=[NoiseSpec.parse(s) for s in _split_list(raw["noise"])],
        filters=[FilterId.parse(s) for s in _split_list(raw["filters"])],
        mask_sizes=[int(s) for s in _split_list(raw["masks"])] if "masks" in raw else [3],
        border=raw.get("border", "replicate"),
        master_seed=int(raw.get("seed", "0")),
        peak=int(raw.get("peak", "256")),
        csv_path=base / raw.get("csv", "bench.csv"),
        plot_path=base / raw.get("plot", "bench_plot.txt"),
        workers=int(raw.get("workers", "1")),
        timing=timing == "on",
    )


def derive_job_seed(master_seed: int, image_id: str, noise_key: str) -> int:
    """Stable 64-bit per-job seed from the master seed and cell identity."""
    digest = hashlib.blake2b(f"{master_seed}|{image_id}|{noise_key}".encode(), digest_size=8)
    return int.from_bytes(digest.digest(), "little")


def _load_corpus(cfg: BenchConfig) -> tuple[list[tuple[str, Image]], list[str]]:
    images: list[tuple[str, Image]] = []
    errors: list[str] = []
    seen: Counter[str] = Counter()
    for p in cfg.corpus:
        try:
            img = read_pnm(p)
        except (OSError, ValueError) as exc:
            errors.append(f"{p}: {exc}")
            continue
        name = Path(p).name
        seen[name] += 1
        image_id = name if seen[name] == 1 else f"{name}#{seen[name]}"
        images.append((image_id, img))
    return images, errors


def _run_job(cfg: BenchConfig, image_id: str, clean: Image, spec: NoiseSpec) -> list[ScoreRow]:
    noise_key = spec.canonical()
    rng = RngStream(derive_job_seed(cfg.master_seed, image_id, noise_key))
    noisy = apply_noise(clean, spec, rng=rng)
    rows = []
    for f in cfg.filters:
        for k in cfg.mask_sizes:
            start = time.perf_counter() if cfg.timing else 0.0
            restored = apply_filter(noisy, f, k, cfg.border)
            wall_ms = (time.perf_counter() - start) * 1e3 if cfg.timing else 0.0
            m = mse(clean, restored)
            rows.append(ScoreRow(image_id, noise_key, f.canonical(), k, m, psnr(m, cfg.peak), wall_ms))
    return rows


def run_bench(cfg: BenchConfig) -> BenchResult:
    """Run the full grid; one noisy image per (image, noise) is shared by all filters."""
    images, errors = _load_corpus(cfg)
    jobs = [(image_id, img, spec) for image_id, img in images for spec in cfg.noise_specs]
    rows: list[ScoreRow] = []
    if cfg.workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            for job_rows in pool.map(lambda j: _run_job(cfg, *j), jobs):
                rows.extend(job_rows)
    else:
        for job in jobs:
            rows.extend(_run_job(cfg, *job))
    rows.sort(key=lambda r: (r.image_id, r.noise, r.filter, r.mask))
    return BenchResult(rows=rows, summary=summarize(rows), errors=errors)


def summarize(rows: list[ScoreRow]) -> list[SummaryRow]:
    """Per (noise, filter, mask): independent means of PSNR and MSE.

    Rows with infinite PSNR (mse = 0) are excluded from mean_psnr and
    counted; mean_psnr is inf when every row was excluded.
    """
    groups: dict[tuple[str, str, int], list[ScoreRow]] = {}
    for r in sorted(rows, key=lambda r: (r.noise, r.filter, r.mask, r.image_id)):
        groups.setdefault((r.noise, r.filter, r.mask), []).append(r)
    out = []
    for (noise_key, filter_key, mask), members in sorted(groups.items()):
        finite = [r.psnr for r in members if not math.isinf(r.psnr)]
        mean_psnr = sum(finite) / len(finite) if finite else math.inf
        mean_mse = sum(r.mse for r in members) / len(members)
        out.append(SummaryRow(noise_key, filter_key, mask, mean_psnr, mean_mse,
                              len(members), len(members) - len(finite)))
    return out


def _fmt(value: float) -> str:
    return "inf" if math.isinf(value) else f"{value:.6f}"


ROWS_HEADER = "image,noise,filter,mask,mse,psnr,wall_ms"
SUMMARY_HEADER = "noise,filter,mask,mean_psnr,mean_mse,n,excluded"


def _write_text(path, text: str) -> None:
    path = Path(path)
    if path.parent != Path(""):
        path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def emit_csv(rows: list[ScoreRow], summary: list[SummaryRow], path) -> None:
    """Rows block, blank line, summary block; all reals at 6 decimal places."""
    lines = [ROWS_HEADER]
    for r in rows:
        lines.append(f"{r.image_id},{r.noise},{r.filter},{r.mask},{_fmt(r.mse)},{_fmt(r.psnr)},{_fmt(r.wall_ms)}")
    lines.append("")
    lines.append(SUMMARY_HEADER)
    for s in summary:
        lines.append(f"{s.noise},{s.filter},{s.mask},{_fmt(s.mean_psnr)},{_fmt(s.mean_mse)},{s.n},{s.excluded}")
    _write_text(path, "\n".join(lines) + "\n")


def emit_plot_data(summary: list[SummaryRow], path) -> None:
    """Self-describing per-noise series, one record per (noise, metric).

    Record grammar::

        record <noise> <metric>      # metric: psnr | mse
        <filter> <mask> <mean>       # one line per (filter, mask)
        end
    """
    lines = [
        "# plot data: mean metric by filter for each noise model",
        "# record <noise> <metric>; body lines: <filter> <mask> <mean>; 'end' closes a record",
    ]
    noise_keys = []
    for s in summary:
        if s.noise not in noise_keys:
            noise_keys.append(s.noise)
    for noise_key in noise_keys:
        for metric in ("psnr", "mse"):
            lines.append(f"record {noise_key} {metric}")
            for s in summary:
                if s.noise == noise_key:
                    value = s.mean_psnr if metric == "psnr" else s.mean_mse
                    lines.append(f"{s.filter} {s.mask} {_fmt(value)}")
            lines.append("end")
    _write_text(path, "\n".join(lines) + "\n")


def read_summary_csv(path) -> list[SummaryRow]:
    """Parse the summary block back out of an emitted CSV."""
    text = Path(path).read_text()
    try:
        _, block = text.split("\n\n", 1)
    except ValueError:
        raise ValueError(f"{path}: no summary block found") from None
    lines = block.strip("\n").split("\n")
    if not lines or lines[0] != SUMMARY_HEADER:
        raise ValueError(f"{path}: bad summary header")
    out = []
    for line in lines[1:]:
        noise_key, filter_key, mask, mean_psnr, mean_mse, n, excluded = line.split(",")
        out.append(SummaryRow(noise_key, filter_key, int(mask), float(mean_psnr),
                              float(mean_mse), int(n), int(excluded)))
    return out
