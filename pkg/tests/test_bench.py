"""Bench pipeline: grid cardinality, fairness, determinism, emission formats."""

from __future__ import annotations

import math

import numpy as np
import pytest

from nldenoise import (
    BenchConfig,
    FilterId,
    NoiseSpec,
    RngStream,
    apply_filter,
    apply_noise,
    load_config,
    mse,
    run_bench,
    write_pnm,
)
from nldenoise.bench import (
    ScoreRow,
    SummaryRow,
    derive_job_seed,
    emit_csv,
    emit_plot_data,
    read_summary_csv,
    summarize,
)
from nldenoise.pnm import read_pnm

from conftest import random_image, textured_image

ALL_FILTERS = [FilterId.parse(s) for s in ("mean", "median", "cmf", "vmf", "smf", "msmf:4")]


def write_corpus(tmp_path, images):
    paths = []
    for i, img in enumerate(images):
        ext = "pgm" if img.channels == 1 else "ppm"
        p = tmp_path / f"img{i:02d}.{ext}"
        write_pnm(p, img)
        paths.append(p)
    return paths


@pytest.fixture
def small_corpus(tmp_path):
    rng = np.random.default_rng(1234)
    images = [random_image(rng, 16, 16, 1 if i % 2 == 0 else 3) for i in range(4)]
    return write_corpus(tmp_path, images)


def test_cardinality_and_fairness(tmp_path, small_corpus):
    cfg = BenchConfig(
        corpus=small_corpus[:1],
        noise_specs=[NoiseSpec.parse("sp:0.5")],
        filters=ALL_FILTERS,
        master_seed=7,
    )
    result = run_bench(cfg)
    assert len(result.rows) == 6
    assert result.errors == []
    # fairness: every filter was applied to the identical corrupted bytes
    clean = read_pnm(small_corpus[0])
    seed = derive_job_seed(7, small_corpus[0].name, "sp:0.5")
    noisy = apply_noise(clean, NoiseSpec.parse("sp:0.5"), rng=RngStream(seed))
    for row in result.rows:
        f = FilterId.parse(row.filter)
        assert row.mse == mse(clean, apply_filter(noisy, f, row.mask))


def test_full_grid_cardinality(small_corpus):
    cfg = BenchConfig(
        corpus=small_corpus,
        noise_specs=[NoiseSpec.parse(s) for s in ("gaussian:0.5", "speckle:0.5", "sp:0.5")],
        filters=ALL_FILTERS,
        mask_sizes=[3],
        master_seed=3,
    )
    result = run_bench(cfg)
    assert len(result.rows) == 4 * 3 * 6 * 1
    keys = {(r.image_id, r.noise, r.filter, r.mask) for r in result.rows}
    assert len(keys) == len(result.rows)
    assert result.rows == sorted(result.rows, key=lambda r: (r.image_id, r.noise, r.filter, r.mask))


def test_zero_density_noise_chain(small_corpus):
    cfg = BenchConfig(
        corpus=small_corpus[:2],
        noise_specs=[NoiseSpec.parse("sp:0")],
        filters=[FilterId("median"), FilterId("vmf")],
        mask_sizes=[1, 3],
        master_seed=5,
    )
    result = run_bench(cfg)
    for row in result.rows:
        clean = read_pnm([p for p in small_corpus if p.name == row.image_id][0])
        expect = mse(clean, apply_filter(clean, FilterId.parse(row.filter), row.mask))
        assert row.mse == expect
        if row.mask == 1:
            assert row.mse == 0.0
            assert math.isinf(row.psnr)
    # k=1 rows are excluded from mean_psnr and counted
    for s in result.summary:
        if s.mask == 1:
            assert s.excluded == 2 and math.isinf(s.mean_psnr)


def test_determinism_across_runs_and_parallelism(tmp_path):
    images = [textured_image(50 + i, 1 if i % 2 else 3, side=24) for i in range(4)]
    paths = write_corpus(tmp_path, images)

    def go(workers, tag):
        cfg = BenchConfig(
            corpus=paths,
            noise_specs=[NoiseSpec.parse(s) for s in ("gaussian:0.5", "speckle:0.5", "sp:0.5")],
            filters=ALL_FILTERS,
            master_seed=99,
            workers=workers,
            csv_path=tmp_path / f"{tag}.csv",
            plot_path=tmp_path / f"{tag}.plot",
        )
        result = run_bench(cfg)
        emit_csv(result.rows, result.summary, cfg.csv_path)
        emit_plot_data(result.summary, cfg.plot_path)
        return (cfg.csv_path.read_bytes(), cfg.plot_path.read_bytes())

    first = go(1, "a")
    again = go(1, "b")
    fanned = go(4, "c")
    assert first == again
    assert first == fanned


def test_row_order_independent_of_corpus_order(tmp_path):
    images = [textured_image(60 + i, 1, side=16) for i in range(3)]
    paths = write_corpus(tmp_path, images)
    spec = [NoiseSpec.parse("sp:0.4")]
    a = run_bench(BenchConfig(corpus=paths, noise_specs=spec, filters=[FilterId("median")], master_seed=1))
    b = run_bench(BenchConfig(corpus=paths[::-1], noise_specs=spec, filters=[FilterId("median")], master_seed=1))
    assert a.rows == b.rows


def test_unreadable_and_malformed_images_reported(tmp_path, small_corpus):
    bad_missing = tmp_path / "missing.pgm"
    bad_garbage = tmp_path / "garbage.pgm"
    bad_garbage.write_bytes(b"not a pnm")
    cfg = BenchConfig(
        corpus=[small_corpus[0], bad_missing, bad_garbage],
        noise_specs=[NoiseSpec.parse("sp:0.2")],
        filters=[FilterId("median")],
        master_seed=2,
    )
    result = run_bench(cfg)
    assert len(result.rows) == 1
    assert len(result.errors) == 2
    assert any("missing.pgm" in e for e in result.errors)
    assert any("garbage.pgm" in e for e in result.errors)


def test_emit_csv_golden_row(tmp_path):
    row = ScoreRow("img.pgm", "sp:0.5:1", "msmf:4", 3, 12.25, 30.5, 0.0)
    summary = summarize([row])
    path = tmp_path / "out.csv"
    emit_csv([row], summary, path)
    assert path.read_text() == (
        "image,noise,filter,mask,mse,psnr,wall_ms\n"
        "img.pgm,sp:0.5:1,msmf:4,3,12.250000,30.500000,0.000000\n"
        "\n"
        "noise,filter,mask,mean_psnr,mean_mse,n,excluded\n"
        "sp:0.5:1,msmf:4,3,30.500000,12.250000,1,0\n"
    )


def test_summary_means_recomputable_from_emitted_rows(tmp_path, small_corpus):
    cfg = BenchConfig(
        corpus=small_corpus,
        noise_specs=[NoiseSpec.parse("sp:0.5"), NoiseSpec.parse("gaussian:0.1")],
        filters=[FilterId("median"), FilterId("mean")],
        master_seed=21,
    )
    result = run_bench(cfg)
    path = tmp_path / "out.csv"
    emit_csv(result.rows, result.summary, path)
    rows_block = path.read_text().split("\n\n")[0].splitlines()[1:]
    groups: dict[tuple, list[tuple[float, float]]] = {}
    for line in rows_block:
        image_id, noise, filt, mask, m, p, _ = line.split(",")
        groups.setdefault((noise, filt, int(mask)), []).append((float(m), float(p)))
    for s in result.summary:
        members = groups[(s.noise, s.filter, s.mask)]
        assert s.n == len(members)
        assert abs(s.mean_mse - sum(m for m, _ in members) / len(members)) <= 1e-6
        assert abs(s.mean_psnr - sum(p for _, p in members) / len(members)) <= 1e-6


def test_plot_data_records_and_regeneration(tmp_path, small_corpus):
    cfg = BenchConfig(
        corpus=small_corpus[:2],
        noise_specs=[NoiseSpec.parse(s) for s in ("gaussian:0.5", "speckle:0.5", "sp:0.5")],
        filters=ALL_FILTERS,
        master_seed=13,
    )
    result = run_bench(cfg)
    csv_path, plot_path, plot2_path = (tmp_path / n for n in ("r.csv", "r.plot", "r2.plot"))
    emit_csv(result.rows, result.summary, csv_path)
    emit_plot_data(result.summary, plot_path)

    text = plot_path.read_text()
    records = [l for l in text.splitlines() if l.startswith("record ")]
    assert len(records) == 6  # 3 noise x 2 metrics
    for metric in ("psnr", "mse"):
        assert sum(1 for r in records if r.endswith(" " + metric)) == 3
    body = [l for l in text.splitlines() if l and not l.startswith(("#", "record", "end"))]
    assert len(body) == 6 * len(ALL_FILTERS)

    # regenerated from the CSV alone -> identical bytes
    emit_plot_data(read_summary_csv(csv_path), plot2_path)
    assert plot2_path.read_bytes() == plot_path.read_bytes()


def test_plot_values_equal_summary_values(tmp_path, small_corpus):
    cfg = BenchConfig(
        corpus=small_corpus[:1],
        noise_specs=[NoiseSpec.parse("sp:0.5")],
        filters=[FilterId("median")],
        master_seed=4,
    )
    result = run_bench(cfg)
    plot_path = tmp_path / "p.plot"
    emit_plot_data(result.summary, plot_path)
    (s,) = result.summary
    lines = plot_path.read_text().splitlines()
    assert f"median 3 {s.mean_psnr:.6f}" in lines
    assert f"median 3 {s.mean_mse:.6f}" in lines


def test_config_validation():
    with pytest.raises(ValueError):
        BenchConfig(corpus=[], noise_specs=[NoiseSpec.parse("sp:0.5")], filters=[FilterId("mean")])
    with pytest.raises(ValueError):
        BenchConfig(corpus=["a"], noise_specs=[], filters=[FilterId("mean")])
    with pytest.raises(ValueError):
        BenchConfig(corpus=["a"], noise_specs=[NoiseSpec.parse("sp:0.5")], filters=[])
    with pytest.raises(ValueError):
        BenchConfig(corpus=["a"], noise_specs=[NoiseSpec.parse("sp:0.5")],
                    filters=[FilterId("mean")], mask_sizes=[4])
    with pytest.raises(ValueError):
        BenchConfig(corpus=["a"], noise_specs=[NoiseSpec.parse("sp:0.5")],
                    filters=[FilterId("msmf", 4)], mask_sizes=[1])
    with pytest.raises(ValueError):
        BenchConfig(corpus=["a"], noise_specs=[NoiseSpec.parse("sp:0.5")],
                    filters=[FilterId("mean")], workers=0)
    with pytest.raises(ValueError):
        BenchConfig(corpus=["a"], noise_specs=[NoiseSpec.parse("sp:0.5")],
                    filters=[FilterId("mean")], peak=100)


def test_load_config_full_and_defaults(tmp_path):
    (tmp_path / "imgs").mkdir()
    cfg_text = """\
# bench over two images
corpus  = imgs/a.pgm, imgs/b.ppm
noise   = sp:0.5, gaussian:0.5:7
filters = mean, msmf:4
masks   = 3, 5
border  = reflect
seed    = 42
peak    = 255
csv     = out/results.csv
plot    = out/plot.txt
workers = 2
timing  = on
"""
    path = tmp_path / "bench.cfg"
    path.write_text(cfg_text)
    cfg = load_config(path)
    assert cfg.corpus == [tmp_path / "imgs/a.pgm", tmp_path / "imgs/b.ppm"]
    assert [s.canonical() for s in cfg.noise_specs] == ["sp:0.5", "gaussian:0.5:7"]
    assert [f.canonical() for f in cfg.filters] == ["mean", "msmf:4"]
    assert cfg.mask_sizes == [3, 5]
    assert (cfg.border, cfg.master_seed, cfg.peak) == ("reflect", 42, 255)
    assert cfg.csv_path == tmp_path / "out/results.csv"
    assert cfg.workers == 2 and cfg.timing is True

    minimal = tmp_path / "min.cfg"
    minimal.write_text("corpus = a.pgm\nnoise = sp:0.5\nfilters = median\n")
    cfg = load_config(minimal)
    assert cfg.mask_sizes == [3] and cfg.border == "replicate"
    assert cfg.master_seed == 0 and cfg.peak == 256
    assert cfg.workers == 1 and cfg.timing is False


def test_load_config_errors(tmp_path):
    cases = {
        "unknown": "corpus = a\nnoise = sp:0.5\nfilters = mean\nbogus = 1\n",
        "missing": "noise = sp:0.5\nfilters = mean\n",
        "dup": "corpus = a\ncorpus = b\nnoise = sp:0.5\nfilters = mean\n",
        "noeq": "corpus\n",
        "timing": "corpus = a\nnoise = sp:0.5\nfilters = mean\ntiming = maybe\n",
    }
    for name, text in cases.items():
        p = tmp_path / f"{name}.cfg"
        p.write_text(text)
        with pytest.raises(ValueError):
            load_config(p)


def test_derive_job_seed_stable_and_distinct():
    a = derive_job_seed(1, "img.pgm", "sp:0.5")
    assert a == derive_job_seed(1, "img.pgm", "sp:0.5")
    assert a != derive_job_seed(2, "img.pgm", "sp:0.5")
    assert a != derive_job_seed(1, "other.pgm", "sp:0.5")
    assert a != derive_job_seed(1, "img.pgm", "sp:0.6")
    assert 0 <= a < 2**64


def test_summarize_groups_and_exclusions():
    rows = [
        ScoreRow("a", "sp:0.5", "median", 3, 4.0, 30.0, 0.0),
        ScoreRow("b", "sp:0.5", "median", 3, 0.0, math.inf, 0.0),
        ScoreRow("c", "sp:0.5", "median", 3, 8.0, 20.0, 0.0),
    ]
    (s,) = summarize(rows)
    assert s == SummaryRow("sp:0.5", "median", 3, 25.0, 4.0, 3, 1)
