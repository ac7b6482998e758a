import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from esnkit.datasets import SeriesData
from esnkit.errors import ArgumentError, DimensionError, NumericOverflowError
from esnkit.esn import (
    EsnModel,
    KnowledgeModel,
    build_model,
    collect_states,
    lorenz_knowledge,
    output_dimension,
    persistence_knowledge,
    step,
)
from esnkit.layers import LayerSpec
from esnkit.states import StateModifier


def scalar_model(alpha, r=0.5, w=1.0, activation="tanh"):
    return EsnModel.standard(np.array([[w]]), np.array([[r]]), leak_rate=alpha, activation=activation)


class TestStep:
    def test_no_leak_keeps_state(self, rng):
        m = EsnModel.standard(rng.normal(size=(4, 2)), rng.normal(size=(4, 4)), leak_rate=0.0)
        x = rng.normal(size=4)
        np.testing.assert_array_equal(step(m, x, rng.normal(size=2)), x)

    def test_zero_reservoir_zero_input(self):
        m = EsnModel.standard(np.eye(3), np.zeros((3, 3)), leak_rate=1.0)
        np.testing.assert_array_equal(step(m, np.ones(3), np.zeros(3)), np.zeros(3))

    def test_scalar_hand_value(self):
        # 0.3 * 0.2 + 0.7 * tanh(0.5 * 0.2 + 0.1), 40-digit evaluation
        x = step(scalar_model(0.7), np.array([0.2]), np.array([0.1]))
        assert x[0] == pytest.approx(0.19816272415743280052, rel=1e-15)

    def test_overflow(self):
        m = EsnModel.standard(np.array([[1e300]]), np.array([[1e300]]), activation="identity")
        with pytest.raises(NumericOverflowError) as exc:
            collect_states(m, np.ones((1, 4)))
        assert exc.value.step == 1

    def test_input_dimension_checked(self):
        with pytest.raises(DimensionError):
            step(scalar_model(1.0), np.zeros(1), np.zeros(2))


class TestCollect:
    def test_single_column(self, rng):
        m = build_model(10, 1, seed=1)
        st_ = collect_states(m, rng.normal(size=(1, 6)), washout=5)
        assert st_.features.shape == (10, 1)

    def test_hand_rollout(self):
        R = np.array([[0.1, -0.2], [0.05, 0.15]])
        Win = np.array([[0.3], [-0.4]])
        m = EsnModel.standard(Win, R, leak_rate=0.6)
        U = np.array([[0.5, -0.25, 1.0, 0.75, -0.5]])
        st_ = collect_states(m, U, washout=2)
        expected = np.array([
            [0.17898499003459352691, -0.22554738441556200961],
            [0.23977419112742184989, -0.27856815229423497466],
            [0.053793681347997696121, -0.01028000700875476476],
        ]).T
        np.testing.assert_allclose(st_.features, expected, rtol=1e-14)
        np.testing.assert_allclose(st_.final_state, expected[:, -1], rtol=1e-14)

    def test_washout_validation(self):
        with pytest.raises(ArgumentError):
            collect_states(build_model(5, 1), np.ones((1, 3)), washout=3)

    def test_accepts_series(self):
        m = build_model(5, 1)
        a = collect_states(m, SeriesData(np.linspace(0, 1, 8)))
        b = collect_states(m, np.linspace(0, 1, 8)[None, :])
        np.testing.assert_array_equal(a.features, b.features)

    @settings(max_examples=15, deadline=None)
    @given(seed=st.integers(0, 10**6), k=st.integers(0, 10))
    def test_washout_drops_prefix(self, seed, k):
        m = build_model(12, 2, seed=seed)
        U = np.random.default_rng(seed).uniform(-1, 1, (2, 15))
        full = collect_states(m, U).features
        np.testing.assert_array_equal(collect_states(m, U, washout=k).features, full[:, k:])

    def test_deep_one_layer_equals_standard(self, rng):
        U = rng.uniform(-1, 1, (2, 40))
        std = collect_states(build_model(20, 2, seed=3), U)
        deep = collect_states(build_model(20, 2, variant="deep", layers=1, seed=3), U)
        np.testing.assert_array_equal(std.features, deep.features)

    def test_deep_layers_chain(self, rng):
        m = build_model(8, 1, variant="deep", layers=3, seed=5)
        U = rng.uniform(-1, 1, (1, 25))
        st_ = collect_states(m, U)
        assert st_.features.shape == (24, 25)
        # each layer is a standard ESN driven by the layer below
        drive = U
        for l in range(3):
            layer = EsnModel.standard(m.input_matrices[l], m.reservoirs[l])
            X = collect_states(layer, drive).features
            np.testing.assert_array_equal(st_.features[8 * l:8 * (l + 1)], X)
            drive = X

    def test_hybrid_rows(self, rng):
        kn = lorenz_knowledge()
        m = build_model(15, 3, variant="hybrid", knowledge=kn, seed=2)
        U = rng.uniform(-5, 5, (3, 12))
        st_ = collect_states(m, U)
        assert st_.raw_states.shape == (18, 12)
        for t in range(12):
            np.testing.assert_array_equal(st_.raw_states[15:, t], kn(U[:, t]))
        # the reservoir sees [u; k(u)]
        x = np.zeros(15)
        for t in range(3):
            x = np.tanh(m.reservoir @ x + m.input_matrix @ np.concatenate([U[:, t], kn(U[:, t])]))
        np.testing.assert_allclose(st_.raw_states[:15, 2], x, rtol=1e-12)

    def test_sparse_reservoir_path(self, rng):
        spec = LayerSpec("rand_sparse", {"density": 0.2, "radius": 0.9})
        m = build_model(30, 1, reservoir=spec, seed=4)
        dense = EsnModel.standard(m.input_matrix, m.reservoir.toarray())
        U = rng.uniform(-1, 1, (1, 30))
        np.testing.assert_allclose(collect_states(m, U).features, collect_states(dense, U).features, rtol=1e-12)


class TestModelValidation:
    def test_shapes(self):
        with pytest.raises(DimensionError):
            EsnModel.standard(np.ones((3, 1)), np.ones((4, 4)))
        with pytest.raises(DimensionError):
            EsnModel.standard(np.ones((3, 1)), np.ones((3, 2)))
        with pytest.raises(DimensionError):
            EsnModel.deep([np.ones((3, 1)), np.ones((2, 2))], [np.eye(3), np.eye(2)])

    def test_leak_range(self):
        with pytest.raises(ArgumentError):
            scalar_model(1.5)

    def test_hybrid_needs_knowledge(self):
        with pytest.raises(ArgumentError):
            EsnModel(((np.ones((2, 2))),), (np.eye(2),), variant="hybrid")
        with pytest.raises(ArgumentError):
            EsnModel.standard(np.ones((2, 2)), np.eye(2), knowledge=persistence_knowledge(1))

    def test_nonfinite(self):
        with pytest.raises(ArgumentError):
            EsnModel.standard(np.array([[np.nan]]), np.eye(1))

    def test_layers_require_deep(self):
        with pytest.raises(ArgumentError):
            build_model(4, 1, layers=2)

    def test_knowledge_dimension(self):
        bad = KnowledgeModel(lambda u: np.zeros(2), 3)
        with pytest.raises(DimensionError):
            bad(np.zeros(3))


class TestOutputDimension:
    def test_default(self):
        assert output_dimension(build_model(100, 3)) == 100

    def test_extended(self):
        m = build_model(100, 3, modifier=StateModifier("extended"))
        assert output_dimension(m) == 103

    def test_padded(self):
        assert output_dimension(build_model(100, 1), StateModifier("padded")) == 101

    def test_matches_features(self, rng):
        m = build_model(10, 2, variant="deep", layers=2, modifier=StateModifier("padded_extended"))
        assert collect_states(m, rng.normal(size=(2, 5))).features.shape[0] == output_dimension(m) == 23


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), alpha=st.sampled_from([0.3, 1.0]))
def test_contraction(seed, alpha):
    r = np.random.default_rng(seed)
    N = 20
    R = r.uniform(-1, 1, (N, N))
    R *= 0.9 / np.linalg.norm(R, 2)
    m = EsnModel.standard(r.uniform(-1, 1, (N, 1)), R, leak_rate=alpha)
    U = r.uniform(-1, 1, (1, 200))
    a, b = r.normal(size=N), r.normal(size=N)
    Xa = collect_states(m, U, x0=a).raw_states
    Xb = collect_states(m, U, x0=b).raw_states
    rate = (1 - alpha) + alpha * 0.9
    d0 = np.linalg.norm(a - b)
    dist = np.linalg.norm(Xa - Xb, axis=0)
    bound = rate ** np.arange(1, 201) * d0
    assert np.all(dist <= bound * (1 + 1e-9) + 1e-300)
