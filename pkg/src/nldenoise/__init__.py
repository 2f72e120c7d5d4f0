"""Nonlinear rank-order image denoising, seeded noise injection, and benchmarking."""

__version__ = "0.1.0"

from .image import BORDER_MODES, Image, Window, extract_window, quantize
from .pnm import PnmError, decode_pnm, encode_pnm, read_pnm, write_pnm
from .noise import (
    NOISE_KINDS,
    NoiseSpec,
    RngStream,
    add_gaussian,
    add_salt_pepper,
    add_speckle,
    apply_noise,
)
from .filters import (
    DEFAULT_MSMF_T,
    FILTER_KINDS,
    DepthRanking,
    FilterId,
    apply_filter,
    backend_name,
    cmf,
    depth_ranking,
    mean,
    median,
    msmf,
    smf,
    spatial_depth,
    vmf,
)
from .metrics import Score, mse, psnr, score
from .bench import (
    BenchConfig,
    BenchResult,
    ScoreRow,
    SummaryRow,
    emit_csv,
    emit_plot_data,
    load_config,
    run_bench,
)

__all__ = [
    "BORDER_MODES",
    "BenchConfig",
    "BenchResult",
    "DEFAULT_MSMF_T",
    "DepthRanking",
    "FILTER_KINDS",
    "FilterId",
    "Image",
    "NOISE_KINDS",
    "NoiseSpec",
    "PnmError",
    "RngStream",
    "Score",
    "ScoreRow",
    "SummaryRow",
    "Window",
    "add_gaussian",
    "add_salt_pepper",
    "add_speckle",
    "apply_filter",
    "apply_noise",
    "backend_name",
    "cmf",
    "decode_pnm",
    "depth_ranking",
    "emit_csv",
    "emit_plot_data",
    "encode_pnm",
    "extract_window",
    "load_config",
    "mean",
    "median",
    "mse",
    "msmf",
    "psnr",
    "quantize",
    "read_pnm",
    "run_bench",
    "score",
    "smf",
    "spatial_depth",
    "vmf",
    "write_pnm",
]
