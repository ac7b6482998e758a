import hashlib

import numpy as np
import pytest

from esnkit import container
from esnkit.config import RunConfig, parse_config
from esnkit.errors import ConfigError, ModelFormatError
from esnkit.esn import build_model, collect_states, lorenz_knowledge
from esnkit.layers import LayerSpec
from esnkit.states import StateModifier
from esnkit.train import train_readout


class TestConfig:
    def test_defaults_match_benchmark_recipe(self):
        c = RunConfig.default()
        assert c["model"]["spectral_radius"] == 1.25
        assert c["model"]["reservoir"] == "rand_sparse" and c["model"]["density"] == 1.0
        assert c["model"]["input_layer"] == "dense_uniform"
        assert c["train"]["lambda"] == 1e-8
        assert c["train"]["train_len"] == c["predict"]["predict_len"] == 4999
        assert c["data"]["system"] == "mackey-glass" and c["data"]["tau"] == 17.0

    def test_unknown_key(self):
        with pytest.raises(ConfigError) as exc:
            parse_config("[model]\nradius = 1\n")
        assert exc.value.key == "model.radius"

    def test_unknown_section(self):
        with pytest.raises(ConfigError):
            parse_config("[extra]\na = 1\n")

    def test_bad_value_names_key(self):
        with pytest.raises(ConfigError) as exc:
            parse_config("[model]\nactivation = relu\n")
        assert exc.value.key == "model.activation"

    def test_washout_too_long(self):
        with pytest.raises(ConfigError) as exc:
            parse_config("[model]\nwashout = 10\n[train]\ntrain_len = 10\n")
        assert exc.value.key == "model.washout"
        assert "washout" in str(exc.value)

    def test_system_keys(self):
        c = parse_config("[data]\nsystem = lorenz\n")
        assert c.system_params()["dt"] == 0.02
        with pytest.raises(ConfigError):
            parse_config("[data]\nsystem = lorenz\ntau = 3\n")

    def test_digest_is_hash_of_canonical_text(self):
        c = parse_config("[model]\nseed = 7\n")
        assert c.digest() == hashlib.sha256(c.canonical_text().encode()).hexdigest()
        assert "model.seed=7\n" in c.canonical_text()
        assert c.digest() != RunConfig.default().digest()
        # order and whitespace of the source do not matter
        same = parse_config("[train]\nlambda=1e-8\n[model]\n  seed   =  7\n")
        assert same.digest() == c.digest()


def _trained(variant="standard", **kw):
    r = np.random.default_rng(0)
    D = 3 if variant == "hybrid" else 1
    m = build_model(12, D, variant=variant, seed=3, **kw)
    st_ = collect_states(m, r.uniform(-1, 1, (D, 30)))
    ro = train_readout(st_, r.uniform(-1, 1, (D, 30)), 1e-6)
    return m, ro, st_


@pytest.mark.parametrize("variant,kw", [
    ("standard", {"modifier": StateModifier("padded_extended", "nlat3", 0.5)}),
    ("standard", {"reservoir": LayerSpec("rand_sparse", {"density": 0.2})}),
    ("deep", {"layers": 2}),
    ("hybrid", {"knowledge": lorenz_knowledge(eps=0.1)}),
])
def test_container_round_trip(tmp_path, variant, kw):
    m, ro, st_ = _trained(variant, **kw)
    p1, p2 = tmp_path / "a.rc", tmp_path / "b.rc"
    text = container.save(p1, m, ro, st_.final_state, st_.final_input, {"config_digest": "abc"})
    assert text.startswith("RCMODEL 1\n")
    saved = container.load(p1)
    for a, b in zip(saved.model.input_matrices, m.input_matrices):
        np.testing.assert_array_equal(a, b)
    for a, b in zip(saved.model.reservoirs, m.reservoirs):
        a = a.toarray() if hasattr(a, "toarray") else a
        b = b.toarray() if hasattr(b, "toarray") else b
        np.testing.assert_array_equal(a, b)
    np.testing.assert_array_equal(saved.readout.W_out, ro.W_out)
    np.testing.assert_array_equal(saved.final_state, st_.final_state)
    assert saved.model.modifier == m.modifier
    assert saved.meta["config_digest"] == "abc"
    container.save(p2, saved.model, saved.readout, saved.final_state, saved.final_input, saved.meta)
    assert p1.read_bytes() == p2.read_bytes()


@pytest.mark.parametrize("needle,replacement,section", [
    ("RCMODEL 1", "RCMODEL 2", "magic"),
    ("readout 1", "readout x", "readout"),
    ("reservoir 0 dense", "reservoir 0 packed", "reservoir"),
    ("base default", "base bogus", "modifier"),
    ("\nend\n", "\n", "end"),
])
def test_corrupt_file_names_section(needle, replacement, section):
    m, ro, st_ = _trained()
    text = container.dumps(m, ro, st_.final_state, st_.final_input)
    assert needle in text
    with pytest.raises(ModelFormatError) as exc:
        container.loads(text.replace(needle, replacement, 1))
    assert exc.value.section == section
    assert section in str(exc.value)


def test_truncated_matrix_names_section():
    m, ro, st_ = _trained()
    lines = container.dumps(m, ro, st_.final_state, st_.final_input).split("\n")
    i = next(k for k, line in enumerate(lines) if line.startswith("input_matrix"))
    lines[i + 1] = "1.0 2.0"
    with pytest.raises(ModelFormatError) as exc:
        container.loads("\n".join(lines))
    assert exc.value.section == "input_matrix"
