import io
import math
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from poseorbit.errors import InvalidArgumentError, InsufficientDataError, TrainingFailureError
from poseorbit.geometry import Image1D, TWO_PI, wrap_angle
from poseorbit.compatibility import volumes
from poseorbit.dataset import generate_dataset
from poseorbit.nn import Node, Checkpoint, ops, backward
from poseorbit.vae import IrrepEmbedding, irrep_matrix, rotate_content, VaeModel, EncoderOutput, encode, \
    reparametrize, decode, loss, save_model, load_model, TrainingConfig, TrainingHistory, TrainingState, train, \
    train_state, validation_loss, hyperparameter_search, save_training_state, load_training_state

angles = st.floats(min_value=-10.0, max_value=10.0, allow_nan=False, allow_infinity=False)


@pytest.fixture
def tiny_model():
    return VaeModel(8, k=2, encoder_hidden=(6,), decoder_hidden=(6,), seed=1)


@pytest.fixture
def pixels():
    return np.random.default_rng(5).uniform(0.0, 1.0, size=(3, 8))


@pytest.fixture
def tiny_dataset():
    return generate_dataset(volumes.asymmetric_triple(), count=40, width=8, seed=2, val_fraction=0.25)


def tiny_config(**kwargs):
    options = dict(k=2, encoder_hidden=(6,), decoder_hidden=(6,), lr=1e-2, batch_size=16, epochs=2, restarts=2,
                   seed=3)
    options.update(kwargs)

    return TrainingConfig(**options)


@given(angles, angles, st.integers(min_value=1, max_value=6))
def test_irrep_is_homomorphism(a, b, k):
    product = irrep_matrix(a, k).matrix @ irrep_matrix(b, k).matrix
    assert np.allclose(product, irrep_matrix(a + b, k).matrix, atol=1e-9)


def test_irrep_blocks():
    emb = IrrepEmbedding(math.pi / 2, 3)
    assert emb.size == 6
    assert np.allclose(emb.matrix.T @ emb.matrix, np.eye(6))
    assert np.allclose(emb.matrix[0:2, 0:2], [[0.0, -1.0], [1.0, 0.0]], atol=1e-12)
    assert np.allclose(emb.matrix[2:4, 2:4], [[-1.0, 0.0], [0.0, -1.0]], atol=1e-12)
    assert np.allclose(irrep_matrix(TWO_PI, 3).matrix, np.eye(6))

    with pytest.raises(InvalidArgumentError):
        IrrepEmbedding(0.0, 0)


def test_rotate_content_matches_matrix():
    content = np.array([0.3, -1.0, 2.0, 0.5, -0.7, 0.1])
    thetas = np.array([0.0, 0.4, 2.9, 5.5])
    rotated = rotate_content(Node(thetas), Node(content), 3).value
    for row, theta in zip(rotated, thetas):
        assert np.allclose(row, irrep_matrix(theta, 3).matrix @ content)

    with pytest.raises(InvalidArgumentError):
        rotate_content(Node(thetas), Node(content[:4]), 3)


def test_rotate_content_gradient():
    content = Node([0.3, -1.0, 2.0, 0.5])
    theta = Node([0.4, 1.7])
    cotangent = np.array([[1.0, -2.0, 0.5, 0.3], [0.2, 0.7, -1.1, 2.0]])
    backward(ops.sum(ops.mul(rotate_content(theta, content, 2), ops.constant(cotangent))))

    # d/dtheta of T(theta) c is the generator applied block-wise
    for b, t in enumerate(theta.value):
        derivative = np.zeros((4, 4))
        for freq in (1, 2):
            block = 2 * (freq - 1)
            c, s = math.cos(freq * t), math.sin(freq * t)
            derivative[block:block + 2, block:block + 2] = freq * np.array([[-s, -c], [c, -s]])
        assert theta.grad[b] == pytest.approx(float(cotangent[b] @ derivative @ content.value))
    expected = sum(irrep_matrix(t, 2).matrix.T @ p for t, p in zip(theta.value, cotangent))
    assert np.allclose(content.grad, expected)


def test_model_construction(tiny_model):
    assert tiny_model.encoder.widths == [8, 6, 3]
    assert tiny_model.decoder.widths == [4, 6, 8]
    assert tiny_model.content.shape == (4,)
    assert tiny_model.parameter_count == (8 * 6 + 6 + 6 * 3 + 3) + 4 + (4 * 6 + 6 + 6 * 8 + 8)

    again = VaeModel(8, k=2, encoder_hidden=(6,), decoder_hidden=(6,), seed=1)
    for p, q in zip(tiny_model.parameters(), again.parameters()):
        assert np.array_equal(p.value, q.value)

    with pytest.raises(InvalidArgumentError):
        VaeModel(1)
    with pytest.raises(InvalidArgumentError):
        VaeModel(8, k=0)
    with pytest.raises(InvalidArgumentError):
        VaeModel(8, beta=-1.0)


def test_encode(tiny_model, pixels):
    out = encode(tiny_model, pixels[0])
    u1, u2 = out.mean_vector
    assert out.mu == pytest.approx(math.atan2(u2, u1) % TWO_PI)
    assert 0.0 <= out.mu < TWO_PI
    assert VaeModel.LOG_VAR_MIN <= out.log_var <= VaeModel.LOG_VAR_MAX
    assert out.variance == pytest.approx(math.exp(out.log_var))
    assert out.rotation.angle == pytest.approx(out.mu)

    u, mu, log_var = tiny_model.encode_batch(pixels)
    assert u.shape == (3, 2)
    assert np.all((mu >= 0.0) & (mu < TWO_PI))
    assert mu[0] == pytest.approx(out.mu)

    same = encode(tiny_model, Image1D(pixels[0], 1.0))
    assert same.mu == out.mu

    with pytest.raises(InvalidArgumentError):
        encode(tiny_model, np.zeros(5))


def test_reparametrize():
    assert reparametrize(1.0, -2.0, 0.0).angle == pytest.approx(1.0)
    assert reparametrize(1.0, -2.0, 1.5).angle == pytest.approx(1.0 + 1.5 * math.exp(-1.0))


@pytest.mark.parametrize("mu,log_var", [(1.0, -1.0), (5.9, 0.5), (0.0, -6.0)])
def test_reparametrize_moments(mu, log_var):
    eps = np.random.default_rng(17).standard_normal(20000)
    offsets = np.array([wrap_angle(reparametrize(mu, log_var, e).angle - mu) for e in eps])
    variance = math.exp(log_var)
    # wrapped normal: E[cos] = exp(-var / 2), E[sin] = 0
    assert np.mean(np.cos(offsets)) == pytest.approx(math.exp(-0.5 * variance), abs=0.02)
    assert np.mean(np.sin(offsets)) == pytest.approx(0.0, abs=0.02)
    if variance < 0.1:
        assert np.var(offsets) == pytest.approx(variance, rel=0.05)


def test_zero_mean_vector_has_no_pose(tiny_model, pixels):
    with pytest.raises(InvalidArgumentError):
        EncoderOutput((0.0, 0.0), 0.0, 0.0)
    with pytest.raises(InvalidArgumentError):
        EncoderOutput((math.nan, 1.0), 0.0, 0.0)

    head_w, head_b = tiny_model.encoder.weights[-1], tiny_model.encoder.biases[-1]
    head_w.value[:2] = 0.0
    head_b.value[:2] = 0.0
    with pytest.raises(InvalidArgumentError):
        encode(tiny_model, pixels[0])
    with pytest.raises(InvalidArgumentError):
        tiny_model.encode_batch(pixels)


def test_encoder_is_continuous(tiny_model):
    rng = np.random.default_rng(23)
    for _ in range(20):
        x = rng.uniform(0.1, 0.9, size=8)
        _, mu, _ = tiny_model.encode_batch(x)
        for scale in (1e-4, 1e-6, 1e-8):
            step = rng.standard_normal(8)
            _, moved, _ = tiny_model.encode_batch(x + scale * step / np.linalg.norm(step))
            assert abs(wrap_angle(moved[0] - mu[0])) < 1e3 * scale


def test_decode_uses_rotated_content(tiny_model):
    for theta in (0.0, 1.3, 4.0):
        image = decode(tiny_model, irrep_matrix(theta, 2))
        assert image.width == 8
        assert np.allclose(image.pixels, tiny_model.decode_batch([theta])[0])
        assert np.all((image.pixels > 0.0) & (image.pixels < 1.0))

    with pytest.raises(InvalidArgumentError):
        decode(tiny_model, irrep_matrix(0.0, 3))


def test_loss_matches_batch_loss(tiny_model, pixels):
    theta, log_var = 2.2, -1.5
    total, bce, kl = tiny_model.posterior_loss(pixels[:1], Node([theta]), Node([log_var]), [0.0])
    assert loss(tiny_model, pixels[0], theta, theta, log_var) == pytest.approx(float(total.value))
    assert float(kl.value[0]) == pytest.approx(VaeModel.KL_OFFSET + 0.75)
    assert float(bce.value[0]) > 0.0


def test_kl_term(tiny_model, pixels):
    x = pixels[0]
    values = [loss(tiny_model, x, 1.0, 1.0, lv) for lv in (-4.0, -1.0, 0.5, 1.0, 2.0)]
    assert values[0] > values[1] > values[2] > values[3]
    # KL is clamped at zero once the spread exceeds the uniform circle
    assert values[3] == pytest.approx(values[4])
    assert loss(tiny_model, x, 1.0, 1.0, -20.0) == pytest.approx(loss(tiny_model, x, 1.0, 1.0, VaeModel.LOG_VAR_MIN))

    with pytest.raises(InvalidArgumentError):
        loss(tiny_model, np.full(8, 1.5), 1.0, 1.0, 0.0)


def test_batch_loss_gradients(tiny_model, pixels):
    epsilon = np.array([0.3, -0.8, 1.1])

    def value() -> float:
        return float(tiny_model.batch_loss(pixels, epsilon)[0].value)

    root, _, _ = tiny_model.batch_loss(pixels, epsilon)
    backward(root)
    h = 1e-6
    for param in (tiny_model.content, tiny_model.encoder.weights[0], tiny_model.decoder.biases[-1]):
        analytic = param.grad.copy()
        for pos in list(np.ndindex(param.shape))[:6]:
            original = param.value[pos]
            param.value[pos] = original + h
            plus = value()
            param.value[pos] = original - h
            minus = value()
            param.value[pos] = original
            assert analytic[pos] == pytest.approx((plus - minus) / (2.0 * h), abs=1e-5)


def test_checkpoint_round_trip(tmp_path, tiny_model, pixels):
    path = str(tmp_path / "model.ckpt")
    read_back = save_model(tiny_model, path, {"lr": "0.001"})
    loaded = load_model(path)
    for model in (read_back, loaded):
        assert model.settings() == tiny_model.settings()
        assert np.array_equal(model.decode_batch([0.5, 3.0]), tiny_model.decode_batch([0.5, 3.0]))
        assert np.array_equal(model.encode_batch(pixels)[1], tiny_model.encode_batch(pixels)[1])

    copy = tiny_model.copy()
    copy.content.value = copy.content.value + 1.0
    assert not np.array_equal(copy.content.value, tiny_model.content.value)


def test_from_checkpoint_errors(tiny_model):
    checkpoint = tiny_model.to_checkpoint()
    broken = Checkpoint({k: v for k, v in checkpoint.settings.items() if k != 'k'}, checkpoint.tensors)
    with pytest.raises(InvalidArgumentError):
        VaeModel.from_checkpoint(broken)

    broken = Checkpoint(checkpoint.settings, {k: v for k, v in checkpoint.tensors.items() if k != 'content'})
    with pytest.raises(InvalidArgumentError):
        VaeModel.from_checkpoint(broken)

    tensors = dict(checkpoint.tensors)
    tensors['content'] = np.zeros(7)
    with pytest.raises(InvalidArgumentError):
        VaeModel.from_checkpoint(Checkpoint(checkpoint.settings, tensors))


def test_training_config():
    config = TrainingConfig()
    assert config.k == VaeModel.DEFAULT_K
    assert config.epochs == 200
    assert config.restarts == 3
    assert sorted(config.settings()) == ['batch_size', 'epochs', 'lr', 'restarts', 'training_seed']

    widened = config.with_hidden((16, 16, 16), (8,))
    assert widened.encoder_hidden == (16, 16, 16)
    assert widened.decoder_hidden == (8,)
    assert widened.lr == config.lr

    for kwargs in ({'epochs': -1}, {'restarts': 0}, {'lr': 0.0}, {'batch_size': 0}, {'encoder_hidden': ()},
                   {'beta': -0.5}, {'k': 0}):
        with pytest.raises(InvalidArgumentError):
            TrainingConfig(**kwargs)


def test_train_is_deterministic(tiny_dataset):
    model_a, history_a = train(tiny_dataset, tiny_config())
    model_b, history_b = train(tiny_dataset, tiny_config())

    assert len(history_a.restarts) == 2
    assert len(history_a) == 2
    assert history_a.selected == history_b.selected
    for p, q in zip(model_a.parameters(), model_b.parameters()):
        assert np.array_equal(p.value, q.value)
    for r_a, r_b in zip(history_a.restarts, history_b.restarts):
        assert [rec.val_loss for rec in r_a.records] == [rec.val_loss for rec in r_b.records]

    finals = [r.final_val_loss for r in history_a.restarts]
    assert history_a.best.final_val_loss == min(finals)
    _, val_x = tiny_dataset.subset(tiny_dataset.validation_indices())
    assert validation_loss(model_a, val_x)[0] == pytest.approx(history_a.best.final_val_loss)


def test_zero_epochs(tiny_dataset):
    model, history = train(tiny_dataset, tiny_config(epochs=0, restarts=1))
    assert len(history) == 0
    assert history.best.final_val_loss == history.best.initial_val_loss
    assert model.width == 8


def test_one_epoch_trains_on_images(tiny_dataset):
    model, history = train(tiny_dataset, tiny_config(epochs=1, restarts=1))
    assert model.width == tiny_dataset.width
    assert len(history.restarts) == 1
    assert [rec.epoch for rec in history.best.records] == [1]
    record = history.best.records[0]
    assert math.isfinite(record.train_loss) and math.isfinite(record.val_loss)
    assert record.val_loss == pytest.approx(record.val_bce + record.val_kl)
    assert not history.best.diverged


def test_checkpoint_seed_reproduces_initial_weights(tiny_dataset):
    config = tiny_config(epochs=0)
    model, _ = train(tiny_dataset, config)
    assert model.seed != config.seed
    again = VaeModel(8, k=2, encoder_hidden=(6,), decoder_hidden=(6,), seed=int(model.settings()['seed']))
    for p, q in zip(model.parameters(), again.parameters()):
        assert np.array_equal(p.value, q.value)

    seeds = {train(tiny_dataset, tiny_config(epochs=0, restarts=1, seed=s))[0].seed for s in range(4)}
    assert len(seeds) == 4


def test_training_state_round_trip(tmp_path, tiny_dataset):
    state, _ = train_state(tiny_dataset, tiny_config(epochs=2, restarts=1))
    assert state.epoch == 2
    assert state.optimizer_state.step == 2 * math.ceil(30 / 16)

    path = str(tmp_path / "state.ckpt")
    read_back = save_training_state(state, path, tiny_config().settings())
    loaded = load_training_state(path)
    for other in (read_back, loaded):
        assert other.epoch == state.epoch
        assert other.optimizer_state.step == state.optimizer_state.step
        for a, b in zip(other.optimizer_state.m + other.optimizer_state.v,
                        state.optimizer_state.m + state.optimizer_state.v):
            assert np.array_equal(a, b)
        for p, q in zip(other.model.parameters(), state.model.parameters()):
            assert np.array_equal(p.value, q.value)
    assert load_model(path).settings() == state.model.settings()

    save_model(state.model, path)
    with pytest.raises(InvalidArgumentError):
        load_training_state(path)
    with pytest.raises(InvalidArgumentError):
        TrainingState(state.model, TrainingState.fresh(VaeModel(8, k=3)).optimizer_state)


def test_resumed_training_matches_uninterrupted(tmp_path, tiny_dataset):
    full, full_history = train_state(tiny_dataset, tiny_config(epochs=4, restarts=1))

    half, _ = train_state(tiny_dataset, tiny_config(epochs=2, restarts=1))
    path = str(tmp_path / "half.ckpt")
    save_training_state(half, path)
    resumed, resumed_history = train_state(tiny_dataset, tiny_config(epochs=4, restarts=1), load_training_state(path))

    assert resumed.epoch == 4
    assert resumed.optimizer_state.step == full.optimizer_state.step
    assert [rec.epoch for rec in resumed_history.best.records] == [3, 4]
    assert [rec.val_loss for rec in resumed_history.best.records] == \
        [rec.val_loss for rec in full_history.best.records[2:]]
    for p, q in zip(resumed.model.parameters(), full.model.parameters()):
        assert np.array_equal(p.value, q.value)

    with pytest.raises(InvalidArgumentError):
        train_state(generate_dataset(volumes.asymmetric_triple(), count=40, width=16, seed=2), tiny_config(),
                    load_training_state(path))


def test_history_csv(tiny_dataset):
    _, history = train(tiny_dataset, tiny_config())
    out = io.StringIO()
    history.write_csv(out)
    lines = out.getvalue().splitlines()
    assert lines[0] == ",".join(TrainingHistory.HEADER)
    assert len(lines) == 1 + 2 * 2
    assert lines[1].startswith("0,1,")
    assert lines[-1].startswith("1,2,")


def test_train_needs_both_splits():
    v = volumes.asymmetric_triple()
    with pytest.raises(InsufficientDataError):
        train(generate_dataset(v, count=10, width=8, val_fraction=0.0), tiny_config())
    with pytest.raises(InsufficientDataError):
        train(generate_dataset(v, count=1, width=8, val_fraction=0.5), tiny_config())


def test_all_restarts_diverging(tiny_dataset, monkeypatch):
    def nan_loss(self, pixels, epsilon):
        return Node(math.nan), math.nan, math.nan

    monkeypatch.setattr(VaeModel, "batch_loss", nan_loss)
    with pytest.raises(TrainingFailureError):
        train(tiny_dataset, tiny_config())


def test_hyperparameter_search(tiny_dataset):
    result = hyperparameter_search(tiny_dataset, tiny_config(epochs=1, restarts=1), depths=(1, 2), widths=(4,))
    assert len(result.trials) == 2
    assert [t.config.encoder_hidden for t in result.trials] == [(4,), (4, 4)]
    losses = [t.val_loss for t in result.trials]
    assert result.selected == int(np.argmin(losses))
    assert result.config.encoder_hidden == result.model.encoder_hidden
    assert not any(t.failed for t in result.trials)

    with pytest.raises(InvalidArgumentError):
        hyperparameter_search(tiny_dataset, tiny_config(), depths=(), widths=(4,))


@pytest.mark.slow
def test_training_reduces_loss():
    dataset = generate_dataset(volumes.asymmetric_triple(), count=600, width=32, seed=11)
    config = TrainingConfig(k=4, encoder_hidden=(64, 64), decoder_hidden=(64, 64), epochs=40, restarts=1, seed=1)
    _, history = train(dataset, config)
    best = history.best
    assert not best.diverged
    assert best.final_val_loss < best.initial_val_loss
    assert best.records[-1].val_bce < best.initial_val_bce
