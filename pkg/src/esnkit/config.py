"""Run configuration: ``[section]`` headers with flat ``key = value`` lines.

Every key is validated against :data:`SCHEMA`; unknown sections or keys are
errors. Missing keys take the defaults below, which reproduce the
Mackey-Glass next-step benchmark (dense uniform input and reservoir,
spectral radius 1.25, ridge 1e-8, 4999 training and prediction steps).
"""
import configparser
import hashlib
from dataclasses import dataclass

from .errors import ConfigError
from .layers import INPUT_KINDS, RESERVOIR_KINDS, LayerSpec
from .states import BASES, NONLINEAR, StateModifier


def _bool(text):
    low = text.strip().lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _floats(text):
    return tuple(float(v) for v in text.replace(",", " ").split())


def _choice(*options):
    def parse(text):
        if text not in options:
            raise ValueError(f"expected one of {', '.join(options)}")
        return text
    return parse


# section -> key -> (parser, default)
SCHEMA = {
    "model": {
        "variant": (_choice("standard", "deep", "hybrid"), "standard"),
        "reservoir": (_choice(*RESERVOIR_KINDS), "rand_sparse"),
        "reservoir_size": (int, 300),
        "spectral_radius": (float, 1.25),
        "density": (float, 1.0),
        "reservoir_weight": (float, 0.9),
        "reservoir_feedback": (float, 0.1),
        "max_value": (float, 1.0),
        "sparsity": (float, 0.1),
        "input_layer": (_choice(*INPUT_KINDS), "dense_uniform"),
        "input_scaling": (float, 1.0),
        "input_weight": (float, 0.1),
        "input_signs": (_choice("random", "pi"), "random"),
        "leak_rate": (float, 1.0),
        "activation": (_choice("tanh", "identity"), "tanh"),
        "modifier": (_choice(*BASES), "default"),
        "nonlinear": (_choice(*NONLINEAR), "none"),
        "pad_value": (float, 1.0),
        "seed": (int, 0),
        "layers": (int, 1),
        "washout": (int, 0),
        "knowledge": (_choice("lorenz", "persistence"), "persistence"),
        "knowledge_eps": (float, 0.05),
    },
    "train": {
        "lambda": (float, 1e-8),
        "train_len": (int, 4999),
        "method": (_choice("auto", "cholesky", "qr"), "auto"),
    },
    "predict": {
        "mode": (_choice("predictive", "generative"), "predictive"),
        "predict_len": (int, 4999),
    },
    "data": {
        "system": (_choice("mackey-glass", "lorenz"), "mackey-glass"),
        "standardize": (_bool, False),
        "tau": (float, 17.0),
        "dt": (float, None),
        "beta": (float, None),
        "gamma": (float, 0.1),
        "n": (float, 10.0),
        "x0": (float, 1.2),
        "discard": (int, None),
        "interpolation": (_choice("linear", "hermite"), "linear"),
        "subsample": (int, 1),
        "sigma": (float, 10.0),
        "rho": (float, 28.0),
        "u0": (_floats, (1.0, 0.0, 0.0)),
    },
}

# data keys each system accepts; dt/beta/discard defaults differ per system
SYSTEM_KEYS = {
    "mackey-glass": {"tau": None, "dt": 0.1, "beta": 0.2, "gamma": None, "n": None, "x0": None,
                     "discard": 1000, "interpolation": None, "subsample": None},
    "lorenz": {"dt": 0.02, "sigma": None, "rho": None, "beta": 8.0 / 3.0, "u0": None, "discard": 500},
}


def _fmt(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return " ".join(_fmt(v) for v in value)
    return str(value)


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved configuration: ``sections[name][key] -> value``."""

    sections: dict

    def __getitem__(self, section):
        return self.sections[section]

    @classmethod
    def default(cls):
        return parse_config("")

    def canonical_text(self):
        """One ``section.key=value`` line per key, sections and keys sorted."""
        lines = [f"{s}.{k}={_fmt(v)}" for s in sorted(self.sections) for k, v in sorted(self.sections[s].items())]
        return "\n".join(lines) + "\n"

    def digest(self):
        return hashlib.sha256(self.canonical_text().encode("utf-8")).hexdigest()

    def replace(self, section, **values):
        new = {s: dict(kv) for s, kv in self.sections.items()}
        new[section].update(values)
        return RunConfig(new)

    # builders -----------------------------------------------------------

    def reservoir_spec(self):
        m = self["model"]
        kind = m["reservoir"]
        params = {
            "rand_sparse": {"density": m["density"], "radius": m["spectral_radius"]},
            "simple_cycle": {"weight": m["reservoir_weight"]},
            "delay_line": {"weight": m["reservoir_weight"]},
            "delay_line_backward": {"weight": m["reservoir_weight"], "feedback": m["reservoir_feedback"]},
            "pseudo_svd": {"max_value": m["max_value"], "sparsity": m["sparsity"]},
        }[kind]
        return LayerSpec(kind, params)

    def input_spec(self):
        m = self["model"]
        kind = m["input_layer"]
        if kind == "minimal":
            return LayerSpec(kind, {"weight": m["input_weight"], "signs": m["input_signs"]})
        return LayerSpec(kind, {"scaling": m["input_scaling"]})

    def modifier(self):
        m = self["model"]
        return StateModifier(m["modifier"], m["nonlinear"], m["pad_value"])

    def system_params(self):
        d = self["data"]
        return {k: d[k] for k in SYSTEM_KEYS[d["system"]]}

    def knowledge_params(self, input_dim):
        m, d = self["model"], self["data"]
        if m["knowledge"] == "persistence":
            return {"dim": input_dim}
        if d["system"] != "lorenz":
            raise ConfigError("the lorenz knowledge model needs system = lorenz", "model.knowledge")
        return {"dt": d["dt"], "sigma": d["sigma"], "rho": d["rho"], "beta": d["beta"], "eps": m["knowledge_eps"]}


def parse_config(text, source="<config>"):
    """Parse and validate config text into a :class:`RunConfig`."""
    cp = configparser.ConfigParser(interpolation=None, default_section="__none__")
    cp.optionxform = str
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from None
    resolved = {s: {k: default for k, (_, default) in keys.items()} for s, keys in SCHEMA.items()}
    given = {}
    for section in cp.sections():
        if section not in SCHEMA:
            raise ConfigError(f"unknown section [{section}]", section)
        for key, raw in cp.items(section):
            if key not in SCHEMA[section]:
                raise ConfigError("unknown key", f"{section}.{key}")
            parser = SCHEMA[section][key][0]
            try:
                resolved[section][key] = parser(raw.strip())
            except ValueError as exc:
                raise ConfigError(str(exc), f"{section}.{key}") from None
            given.setdefault(section, set()).add(key)

    data = resolved["data"]
    allowed = SYSTEM_KEYS[data["system"]]
    for key in given.get("data", set()) - {"system", "standardize"}:
        if key not in allowed:
            raise ConfigError(f"not a parameter of system {data['system']}", f"data.{key}")
    for key in list(data):
        if key in ("system", "standardize"):
            continue
        if key not in allowed:
            del data[key]
        elif data[key] is None:
            data[key] = allowed[key]

    model = resolved["model"]
    if model["variant"] != "hybrid":
        del model["knowledge"], model["knowledge_eps"]
    for key in ("reservoir_size", "layers"):
        if model[key] < 1:
            raise ConfigError("must be >= 1", f"model.{key}")
    if model["washout"] < 0:
        raise ConfigError("must be >= 0", "model.washout")
    if not 0.0 <= model["leak_rate"] <= 1.0:
        raise ConfigError("must lie in [0, 1]", "model.leak_rate")
    if model["variant"] != "deep" and model["layers"] != 1:
        raise ConfigError("layers > 1 requires variant = deep", "model.layers")
    if resolved["train"]["lambda"] < 0:
        raise ConfigError("must be >= 0", "train.lambda")
    if resolved["train"]["train_len"] < 1:
        raise ConfigError("must be >= 1", "train.train_len")
    if resolved["predict"]["predict_len"] < 1:
        raise ConfigError("must be >= 1", "predict.predict_len")
    if model["washout"] >= resolved["train"]["train_len"]:
        raise ConfigError(
            f"washout ({model['washout']}) must be smaller than train_len ({resolved['train']['train_len']})",
            "model.washout",
        )
    return RunConfig(resolved)


def load_config(path):
    if path is None:
        return RunConfig.default()
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), source=str(path))
