"""Echo state networks: reservoirs, state modifiers, ridge readouts, inference."""
from .datasets import SeriesData, lorenz, mackey_glass, next_step_pairs
from .errors import (
    ArgumentError,
    CannotRescaleError,
    ConvergenceError,
    DimensionError,
    EsnError,
    NumericOverflowError,
    SingularSystemError,
)
from .esn import EsnModel, KnowledgeModel, StateMatrix, build_model, collect_states, output_dimension, step
from .linalg import rescale_spectral_radius, solve_regularized_ls, sparse_uniform, spectral_radius
from .predict import PredictionRun, predict_generative, predict_predictive
from .states import StateModifier, apply_modifier, nonlinear_transform
from .train import ReadoutLayer, train_readout

__version__ = "0.1.0"
