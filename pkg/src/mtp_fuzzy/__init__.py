"""Fuzzy reasoning by movement and transformation of rule sets."""

from .baselines import (
    UNKNOWN,
    GammaSet,
    UniverseBounds,
    hellendoorn_gmp,
    mamdani_classic_infer,
    sugeno_infer,
    sugeno_membership,
    wang_distance_infer,
)
from .datasets import Dataset, Record, load_dataset, load_fixture, mape
from .errors import (
    DatasetParseError,
    DegenerateDistanceError,
    DegenerateWeightsError,
    DomainError,
    EmptyResultError,
    FuzzyError,
    FuzzyInputError,
    MetricUndefinedError,
    NoActiveRuleError,
    TrainingDivergedError,
    UnsupportedCompositionError,
)
from .experiments import PartitionSpec, RunReport, build_rule_grid, run_experiment
from .inference import (
    CrispObservation,
    DeltaMap,
    IndexMap,
    SingleRule,
    StructuredObservation,
    fmp_infer,
    fmt_infer,
)
from .mamdani import MamdaniRule, MamdaniSystem, mamdani_mtp_infer
from .pisigma import FnnParams, TrainConfig, TrainTrace, fnn_forward, fnn_gradients, fnn_loss, fnn_train
from .sets import EMPTY, GaussianSet, MtpSet, TriangularSet, centroid_defuzzify
from .takagi_sugeno import TSRule, TSSystem, crisp_movement, movement_degree, ts_mtp_infer

__version__ = "0.1.0"
