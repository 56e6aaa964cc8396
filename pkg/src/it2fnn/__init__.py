"""Interval type-2 fuzzy neural network for Parkinson's disease detection
from vertical ground reaction force gait recordings."""

__version__ = "0.1.0"

from ._kernels import BACKEND
from .errors import It2fnnError
from .evaluation import (
    MetricsReport,
    compute_metrics,
    loocv,
    noise_experiment,
    online_experiment,
    sweep_rule_count,
)
from .fcm import FcmConfig, FcmResult, fcm_cluster
from .features import (
    NormalizationParams,
    RawFeatures,
    StrideTable,
    apply_normalization,
    compute_raw_features,
    gait_asymmetry,
    fit_normalization,
    reduce_features,
    segment_strides,
)
from .learning import BatchConfig, OnlineConfig, batch_train, online_update
from .network import FuzzyRule, RuleBase, fire_rule, infer, membership_bounds, predict
from .pipeline import FeatureTable, extract_directory, extract_features, read_feature_csv
from .preprocess import PreprocessConfig, median_filter, remove_turnarounds, trim_edges
from .report import explain, export_fuzzy_sets, export_rule_grid
from .vgrf_io import Cohort, Dataset, VgrfRecording, load_dataset, parse_recording
