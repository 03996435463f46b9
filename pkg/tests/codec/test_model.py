import numpy as np
import pytest

from oslo.codec import (
    ArchConfig,
    CodecModel,
    encode_forward,
    quantize,
    rd_loss,
)
from oslo.tensor import SphereMap, Tape, backward


# Test construction
def test_parameter_names_are_unique(toy_model):
    names = [p.name for p in toy_model.parameters()]
    assert len(names) == len(set(names))
    assert "e.conv0.hop0.theta" in names
    assert "d_s.conv1.hop0.bias" in names
    assert "prior.matrix0" in names


def test_layer_names(toy_model):
    kernels = [name for name, _ in toy_model.named_kernels()]
    assert kernels == [
        "e.conv0.hop0",
        "d.conv0.hop0",
        "e_s.conv0.hop0",
        "e_s.conv1.hop0",
        "d_s.conv0.hop0",
        "d_s.conv1.hop0",
    ]


def test_gdn_between_stages():
    model = CodecModel.create(ArchConfig(order=4, num_stages=2, hyper_stages=1), seed=0)
    encoder = [layer.name for layer in model.encoder.layers]
    decoder = [layer.name for layer in model.decoder.layers]
    assert encoder == ["e.conv0", "e.gdn0", "e.conv1"]
    assert decoder == ["d.conv0", "d.igdn0", "d.conv1"]
    assert model.decoder.gdn_layers()[0].inverse


def test_seed_determinism(toy_config):
    first = CodecModel.create(toy_config.arch, seed=5)
    second = CodecModel.create(toy_config.arch, seed=5)
    other = CodecModel.create(toy_config.arch, seed=6)
    assert first.model_hash() == second.model_hash()
    assert first.model_hash() != other.model_hash()


def test_model_hash_tracks_weights(toy_model):
    before = toy_model.model_hash()
    toy_model.parameters()[0].values[0, 0, 0] += 1e-3
    assert toy_model.model_hash() != before


# Test the forward pass
def test_forward_shapes(toy_model, toy_maps):
    result = encode_forward(toy_model, toy_maps[0])
    assert (result.y.channels, result.y.order.value) == (4, 2)
    assert (result.nu.channels, result.nu.order.value) == (4, 1)
    assert result.scale.data.shape == result.y.data.shape
    assert (result.x_hat.channels, result.x_hat.order.value) == (3, 3)
    assert result.npix == 768


def test_eval_rounds_latents(toy_model, toy_maps):
    result = encode_forward(toy_model, toy_maps[1], training=False)
    np.testing.assert_array_equal(result.y_hat.data, np.rint(result.y.data))
    np.testing.assert_array_equal(result.nu_hat.data, np.rint(result.nu.data))
    assert result.rate_bits.item() >= 0.0
    assert (result.scale.data >= 0.11).all()


def test_training_adds_bounded_noise(toy_model, toy_maps):
    result = encode_forward(
        toy_model, toy_maps[0], training=True, rng=np.random.default_rng(0)
    )
    noise = result.y_hat.data - result.y.data
    assert np.abs(noise).max() <= 0.5
    assert not np.array_equal(result.y_hat.data, np.rint(result.y.data))


def test_eval_forward_is_deterministic(toy_model, toy_maps):
    first = encode_forward(toy_model, toy_maps[2])
    second = encode_forward(toy_model, toy_maps[2])
    np.testing.assert_array_equal(first.x_hat.data, second.x_hat.data)
    assert first.rate_bits.item() == second.rate_bits.item()


def test_rounding_ties_to_even():
    x = SphereMap(np.array([[2.4, -2.5, 3.5, 0.5, -0.6] + [0.0] * 7]), 0)
    with Tape() as tape:
        rounded = quantize(x, training=False)
    np.testing.assert_array_equal(rounded.data[0, :5], [2.0, -2.0, 4.0, 0.0, -1.0])
    assert len(tape) == 0


@pytest.mark.parametrize(
    "data, order, match",
    [
        (np.zeros((3, 192)), 2, "expects order 3"),
        (np.zeros((2, 768)), 3, "expects 3 channels"),
    ],
)
def test_input_mismatch(toy_model, data, order, match):
    with pytest.raises(ValueError, match=match):
        encode_forward(toy_model, SphereMap(data, order))


# Test the loss
def test_rd_loss_value(toy_model, toy_maps):
    result = encode_forward(toy_model, toy_maps[0])
    expected = result.mse.item() + 0.05 * result.rate_bits.item() / 768
    assert rd_loss(result, 0.05).item() == pytest.approx(expected, rel=1e-12)


def test_zero_lambda_is_pure_distortion(toy_model, toy_maps):
    with Tape() as tape:
        result = encode_forward(
            toy_model, toy_maps[0], training=True, rng=np.random.default_rng(0)
        )
        loss = rd_loss(result, 0.0)
    assert loss is result.mse
    toy_model.zero_grad()
    backward(tape, loss)
    for param in toy_model.prior.parameters() + toy_model.hyper_decoder.parameters():
        assert not param.grad.any(), param.name
    assert toy_model.encoder.parameters()[0].grad.any()


def gradient_model():
    arch = ArchConfig(
        order=3, num_stages=2, hyper_stages=0, channels_n=2, channels_m=2, hops=1
    )
    model = CodecModel.create(arch, seed=11)
    params = model.named_parameters()
    # keep every predicted scale well above its lower bound
    params["d_s.conv0.hop0.theta"].values *= 0.01
    params["d_s.conv0.hop0.bias"].values[...] = 1.0
    return model


def test_end_to_end_gradients(toy_maps):
    model = gradient_model()
    x = toy_maps[3]

    def loss_value():
        result = encode_forward(model, x, training=True, rng=np.random.default_rng(4))
        return rd_loss(result, 0.1).item()

    model.zero_grad()
    with Tape() as tape:
        result = encode_forward(model, x, training=True, rng=np.random.default_rng(4))
        loss = rd_loss(result, 0.1)
    backward(tape, loss)

    picker = np.random.default_rng(0)
    step = 1e-6
    for param in model.parameters():
        for flat in picker.choice(param.size, size=min(3, param.size), replace=False):
            index = np.unravel_index(flat, param.shape)
            original = param.values[index]
            param.values[index] = original + step
            plus = loss_value()
            param.values[index] = original - step
            minus = loss_value()
            param.values[index] = original
            numeric = (plus - minus) / (2.0 * step)
            assert param.grad[index] == pytest.approx(
                numeric, rel=1e-3, abs=1e-6
            ), param.name
