import numpy as np
import pytest

from dacsearch.nn import AdamOptimizer, Mlp


def naive_forward(mlp, x):
    """Scalar-by-scalar recomputation of the forward pass."""
    a = list(x)
    last = len(mlp.weights) - 1
    for layer, (W, b) in enumerate(zip(mlp.weights, mlp.biases)):
        out = []
        for j in range(W.shape[1]):
            s = float(b[j])
            for i in range(W.shape[0]):
                s += a[i] * float(W[i, j])
            if layer < last:
                s = max(0.0, s)
            out.append(s)
        a = out
    return a


def loss_of(mlp, X, actions, targets):
    q = mlp.forward_batch(X)
    err = q[np.arange(len(X)), actions] - targets
    return 0.5 * float(np.mean(err**2))


def finite_diff_grads(mlp, X, actions, targets, h=1e-5):
    grads = []
    for p in mlp.params:
        g = np.zeros_like(p)
        flat = p.reshape(-1)
        gflat = g.reshape(-1)
        for k in range(flat.size):
            orig = flat[k]
            flat[k] = orig + h
            up = loss_of(mlp, X, actions, targets)
            flat[k] = orig - h
            down = loss_of(mlp, X, actions, targets)
            flat[k] = orig
            gflat[k] = (up - down) / (2 * h)
        grads.append(g)
    return grads


def random_problem(rng, sizes=(7, 6, 3), batch=5):
    mlp = Mlp(sizes, seed=rng.integers(10**9))
    X = rng.normal(size=(batch, sizes[0]))
    actions = rng.integers(0, sizes[-1], size=batch)
    targets = rng.normal(size=batch)
    return mlp, X, actions, targets


class TestForward:
    def test_zero_weights_give_biases(self):
        mlp = Mlp((3, 2), seed=0)
        mlp.weights[0][...] = 0.0
        mlp.biases[0][...] = [1.5, -2.0]
        assert np.allclose(mlp.forward([4.0, 5.0, 6.0]), [1.5, -2.0])

    def test_identity_single_layer(self):
        mlp = Mlp((3, 3), seed=0)
        mlp.weights[0][...] = np.eye(3)
        mlp.biases[0][...] = 0.0
        x = [0.5, -1.0, 2.0]
        assert np.allclose(mlp.forward(x), x)

    def test_matches_scalar_recomputation(self):
        rng = np.random.default_rng(12)
        for _ in range(10):
            mlp, X, _, _ = random_problem(rng)
            for x in X:
                assert np.allclose(mlp.forward(x), naive_forward(mlp, x), atol=1e-12)

    def test_batch_consistent_with_single(self):
        rng = np.random.default_rng(3)
        mlp, X, _, _ = random_problem(rng)
        batch = mlp.forward_batch(X)
        for row, x in zip(batch, X):
            assert np.allclose(row, mlp.forward(x))

    def test_shape_mismatch(self):
        mlp = Mlp((4, 2), seed=0)
        with pytest.raises(ValueError):
            mlp.forward([1.0, 2.0])

    def test_finite_outputs(self):
        rng = np.random.default_rng(5)
        mlp, X, _, _ = random_problem(rng)
        assert np.all(np.isfinite(mlp.forward_batch(X)))


class TestGradients:
    def test_zero_error_gives_zero_gradient(self):
        rng = np.random.default_rng(8)
        mlp, X, actions, _ = random_problem(rng)
        q = mlp.forward_batch(X)
        targets = q[np.arange(len(X)), actions]
        loss, grads = mlp.td_gradients(X, actions, targets)
        assert loss == 0.0
        assert all(np.allclose(g, 0.0) for g in grads)

    def test_matches_finite_differences(self):
        rng = np.random.default_rng(21)
        for _ in range(10):
            mlp, X, actions, targets = random_problem(rng)
            _, analytic = mlp.td_gradients(X, actions, targets)
            numeric = finite_diff_grads(mlp, X, actions, targets)
            for a, n in zip(analytic, numeric):
                denom = np.maximum(np.abs(a) + np.abs(n), 1e-8)
                assert np.max(np.abs(a - n) / denom) < 1e-4

    def test_duplicated_sample_keeps_gradient(self):
        rng = np.random.default_rng(4)
        mlp, X, actions, targets = random_problem(rng, batch=1)
        _, single = mlp.td_gradients(X, actions, targets)
        X2 = np.vstack([X, X])
        _, doubled = mlp.td_gradients(X2, list(actions) * 2, list(targets) * 2)
        for a, b in zip(single, doubled):
            assert np.allclose(a, b)

    def test_loss_value(self):
        mlp = Mlp((2, 2), seed=0)
        mlp.weights[0][...] = 0.0
        mlp.biases[0][...] = [1.0, 3.0]
        loss, _ = mlp.td_gradients([[0.0, 0.0]], [1], [1.0])  # q=3, target=1
        assert loss == pytest.approx(2.0)  # 0.5 * (3-1)^2

    def test_batch_size_mismatch(self):
        mlp = Mlp((2, 2), seed=0)
        with pytest.raises(ValueError):
            mlp.td_gradients([[0.0, 0.0]], [0, 1], [1.0])


class TestAdam:
    def test_zero_gradient_fresh_optimizer_keeps_params(self):
        mlp = Mlp((3, 2), seed=1)
        before = [p.copy() for p in mlp.params]
        opt = AdamOptimizer()
        opt.step(mlp.params, [np.zeros_like(p) for p in mlp.params])
        for b, p in zip(before, mlp.params):
            assert np.array_equal(b, p)

    def test_first_step_closed_form(self):
        lr, eps = 1e-3, 1e-8
        mlp = Mlp((3, 2), seed=2)
        before = [p.copy() for p in mlp.params]
        grads = [np.full_like(p, 0.25) for p in mlp.params]
        grads[1][...] = -3.0  # mixed signs and magnitudes
        opt = AdamOptimizer(lr=lr, eps=eps)
        opt.step(mlp.params, grads)
        for b, p, g in zip(before, mlp.params, grads):
            expected = b - lr * g / (np.abs(g) + eps)
            assert np.max(np.abs(p - expected)) < 1e-10

    def test_constant_gradient_step_approaches_lr(self):
        opt = AdamOptimizer(lr=1e-3)
        param = np.array([0.0])
        grad = np.array([0.7])
        for _ in range(2000):
            prev = param.copy()
            opt.step([param], [grad])
        assert abs(abs(param - prev)[0] - 1e-3) < 1e-5

    def test_moments_advance(self):
        opt = AdamOptimizer()
        param = np.array([1.0])
        opt.step([param], [np.array([1.0])])
        assert opt.t == 1
        opt.step([param], [np.array([1.0])])
        assert opt.t == 2


class TestSerialization:
    def test_round_trip_exact(self):
        mlp = Mlp((5, 4, 3), seed=7)
        clone = Mlp.from_dict(mlp.to_dict())
        for a, b in zip(mlp.params, clone.params):
            assert np.array_equal(a, b)

    def test_copy_is_independent(self):
        mlp = Mlp((3, 2), seed=0)
        clone = mlp.copy()
        mlp.weights[0][0, 0] += 1.0
        assert clone.weights[0][0, 0] != mlp.weights[0][0, 0]

    def test_inconsistent_shapes_rejected(self):
        data = Mlp((3, 2), seed=0).to_dict()
        data["sizes"] = [3, 5]
        with pytest.raises(ValueError):
            Mlp.from_dict(data)
