import csv
import dataclasses
import io

import numpy as np
import pytest

from oslo.codec import (
    LOG_CSV_HEADER,
    ArchConfig,
    CodecConfig,
    CodecModel,
    LossConfig,
    draw_batch,
    evaluate_codec,
    load_dataset,
    train,
)
from oslo.geometry import pix2ang_array
from oslo.io import write_hpxm
from oslo.metrics import decibels
from oslo.ops import crop_patch, make_patch
from oslo.tensor import SphereMap


def with_train(config, **changes):
    return dataclasses.replace(config, train=dataclasses.replace(config.train, **changes))


# Test batches and datasets
def test_draw_batch(toy_config, toy_maps):
    batch = draw_batch(toy_maps, toy_config, np.random.default_rng(0))
    assert len(batch) == 2
    assert all(x.patch is not None and x.npix == 16 for x in batch)
    again = draw_batch(toy_maps, toy_config, np.random.default_rng(0))
    for first, second in zip(batch, again):
        np.testing.assert_array_equal(first.data, second.data)


def test_full_sphere_batches(toy_config, toy_maps):
    config = with_train(toy_config, patch_side=None)
    batch = draw_batch(toy_maps, config, np.random.default_rng(0))
    assert all(x.patch is None and x.npix == 768 for x in batch)


def test_load_dataset(tmp_path, toy_maps):
    paths = []
    for i, x in enumerate(toy_maps[:2]):
        paths.append(tmp_path / f"map{i}.hpxm")
        write_hpxm(paths[-1], x)
    maps = load_dataset(paths)
    assert len(maps) == 2
    np.testing.assert_allclose(maps[1].data, toy_maps[1].data, rtol=1e-6)


# Test training
def test_one_record_per_step(toy_config, toy_model, toy_maps):
    seen = []
    log = train(toy_model, toy_maps, toy_config, progress=seen.append)
    assert [r.step for r in log.records] == list(range(1, 21))
    assert seen == log.records
    assert all(np.isfinite(r.loss) and r.rate_bpp >= 0.0 for r in log.records)
    assert all(r.learning_rate == 1e-3 for r in log.records)


def test_training_is_reproducible(toy_config, toy_maps):
    first = CodecModel.create(toy_config.arch, seed=3)
    second = CodecModel.create(toy_config.arch, seed=3)
    assert train(first, toy_maps, toy_config).losses == train(
        second, toy_maps, toy_config
    ).losses
    assert first.model_hash() == second.model_hash()


def test_seed_changes_the_run(toy_config, toy_maps):
    first = train(CodecModel.create(toy_config.arch, seed=3), toy_maps, toy_config)
    second = train(
        CodecModel.create(toy_config.arch, seed=3),
        toy_maps,
        with_train(toy_config, seed=2),
    )
    assert first.losses != second.losses


def test_training_updates_weights(toy_config, toy_model, toy_maps):
    before = toy_model.model_hash()
    train(toy_model, toy_maps, with_train(toy_config, steps=2))
    assert toy_model.model_hash() != before


def test_loss_goes_down(toy_config, toy_model, toy_maps):
    config = with_train(toy_config, steps=60, learning_rate=1e-2)
    losses = train(toy_model, toy_maps, config).losses
    assert np.mean(losses[-10:]) < np.mean(losses[:10])


def test_gdn_stays_feasible(toy_maps):
    config = CodecConfig(
        arch=ArchConfig(order=3, num_stages=2, hyper_stages=0, channels_n=4, channels_m=4),
        train=dataclasses.replace(
            CodecConfig().train, steps=10, batch_size=1, learning_rate=0.05, patch_side=8
        ),
    )
    model = CodecModel.create(config.arch, seed=0)
    train(model, toy_maps, config)
    for layer in model.encoder.gdn_layers() + model.decoder.gdn_layers():
        assert (layer.params.beta.values > 0.0).all()
        assert (layer.params.gamma.values >= 0.0).all()


def test_divergence_raises(toy_config, toy_model, toy_maps):
    toy_model.named_parameters()["d.conv0.hop0.bias"].values[0] = np.nan
    with pytest.raises(FloatingPointError, match="diverged at step 1"):
        train(toy_model, toy_maps, toy_config)


def test_rejects_bad_datasets(toy_config, toy_model, toy_maps):
    with pytest.raises(ValueError, match="at least one map"):
        train(toy_model, [], toy_config)
    with pytest.raises(ValueError, match="expects order 3"):
        train(toy_model, [SphereMap(np.zeros((3, 192)), 2)], toy_config)
    patch = crop_patch(toy_maps[0], make_patch(3, 4, rng_seed=0))
    with pytest.raises(ValueError, match="whole sphere"):
        train(toy_model, [patch], toy_config)


def test_rejects_other_architecture(toy_config, toy_maps):
    model = CodecModel.create(dataclasses.replace(toy_config.arch, channels_n=2))
    with pytest.raises(ValueError, match="another architecture"):
        train(model, toy_maps, toy_config)


# Test the training log
def test_log_csv(tmp_path, toy_config, toy_model, toy_maps):
    log = train(toy_model, toy_maps, with_train(toy_config, steps=3))
    path = tmp_path / "log.csv"
    log.write_csv(path)
    with open(path, newline="", encoding="utf-8") as handle:
        rows = list(csv.reader(handle))
    assert tuple(rows[0]) == LOG_CSV_HEADER
    assert [row[0] for row in rows[1:]] == ["1", "2", "3"]
    assert float(rows[1][1]) == log.records[0].loss
    assert float(rows[3][2]) == decibels(log.records[2].mse)

    buffer = io.StringIO()
    log.write_csv(buffer)
    assert buffer.getvalue().replace("\r\n", "\n") == path.read_text(
        encoding="utf-8"
    ).replace("\r\n", "\n")


def test_smoothed_log(toy_config, toy_model, toy_maps):
    log = train(toy_model, toy_maps, with_train(toy_config, steps=4))
    smoothed = log.smoothed(2)
    assert smoothed[0] == log.losses[0]
    assert smoothed[3] == pytest.approx((log.losses[2] + log.losses[3]) / 2)


# Test evaluation
def test_evaluate_codec(toy_model, toy_maps):
    evaluation = evaluate_codec(toy_model, toy_maps)
    assert evaluation.rate_bpp >= 0.0
    assert evaluation.psnr == pytest.approx(decibels(evaluation.mse))
    with pytest.raises(ValueError, match="Nothing"):
        evaluate_codec(toy_model, [])


# Test rate-distortion behavior over long runs
def slow_config(lmbda, steps=2000):
    return CodecConfig(
        arch=ArchConfig(order=4, num_stages=2, hyper_stages=1, channels_n=8, channels_m=8),
        loss=LossConfig(lmbda),
        train=dataclasses.replace(
            CodecConfig().train,
            steps=steps,
            batch_size=4,
            learning_rate=1e-3,
            patch_side=8,
            seed=0,
            average_window=200,
        ),
    )


def order4_maps(count):
    theta, phi = pix2ang_array(4, np.arange(3072))
    maps = []
    for shift in range(count):
        x = np.sin(theta) * np.cos(phi + shift)
        y = np.sin(theta) * np.sin(phi + shift)
        z = np.cos(theta)
        data = np.stack([0.5 + 0.3 * x * z, 0.5 + 0.2 * y, 0.5 + 0.25 * z * z - 0.1])
        maps.append(SphereMap(data, 4))
    return maps


@pytest.mark.slow
def test_smoothed_loss_does_not_rise():
    config = slow_config(0.01)
    log = train(CodecModel.create(config.arch, seed=0), order4_maps(6), config)
    checkpoints = log.smoothed(200)[199::200]
    for earlier, later in zip(checkpoints, checkpoints[1:]):
        assert later <= earlier * 1.02


@pytest.mark.slow
def test_lambda_orders_rate_and_quality():
    maps = order4_maps(6)
    results = []
    for lmbda in (0.001, 0.01, 0.1):
        config = slow_config(lmbda)
        model = CodecModel.create(config.arch, seed=0)
        train(model, maps, config)
        results.append(evaluate_codec(model, maps))
    for low, high in zip(results, results[1:]):
        assert high.rate_bpp <= low.rate_bpp * 1.05
        assert high.psnr <= low.psnr * 1.05


@pytest.mark.slow
def test_overfits_a_single_map():
    maps = order4_maps(1)
    config = slow_config(0.001, steps=1500)
    model = CodecModel.create(config.arch, seed=0)
    before = evaluate_codec(model, maps).psnr
    train(model, maps, config)
    assert evaluate_codec(model, maps).psnr > before + 3.0
