"""Persistence-based peak extraction, denoising, and classification of spectra."""

from .classify import (
    CVReport,
    ForestModel,
    LogisticModel,
    balanced_accuracy,
    fit_forest,
    fit_logistic,
    gini,
    group_cv,
    group_folds,
    predict_forest,
    predict_logistic,
)
from .core import (
    LabeledDataset,
    MSImage,
    Spectrum,
    load_dataset_csv,
    load_spectrum_csv,
    read_pgm,
    write_pgm,
    write_spectrum_csv,
)
from .diagram import PersistenceDiagram, bottleneck_distance, write_diagram_csv
from .features import FeatureMatrix, build_matrix, to_persistence_vector, write_matrix_csv
from .persistence import (
    ExtremaSet,
    FeatureTriple,
    PersistencePair,
    detect_extrema,
    filter_top_k,
    oracle_transform,
    reduce,
    to_diagram,
    transform,
    write_pairs_csv,
    write_triples_csv,
)
from .simulate import (
    BenchResult,
    NoiseModel,
    SimulationSpec,
    add_noise,
    bench_denoise,
    denoise,
    generate_ground_truth,
    mask_iou,
    mean_image,
    otsu_threshold,
    recovered_mask,
)

__version__ = "0.1.0"

__all__ = [
    "BenchResult",
    "CVReport",
    "ExtremaSet",
    "FeatureMatrix",
    "FeatureTriple",
    "ForestModel",
    "LabeledDataset",
    "LogisticModel",
    "MSImage",
    "NoiseModel",
    "PersistenceDiagram",
    "PersistencePair",
    "SimulationSpec",
    "Spectrum",
    "add_noise",
    "balanced_accuracy",
    "bench_denoise",
    "bottleneck_distance",
    "build_matrix",
    "denoise",
    "detect_extrema",
    "filter_top_k",
    "fit_forest",
    "fit_logistic",
    "generate_ground_truth",
    "gini",
    "group_cv",
    "group_folds",
    "load_dataset_csv",
    "load_spectrum_csv",
    "mask_iou",
    "mean_image",
    "oracle_transform",
    "otsu_threshold",
    "predict_forest",
    "predict_logistic",
    "read_pgm",
    "recovered_mask",
    "reduce",
    "to_diagram",
    "to_persistence_vector",
    "transform",
    "write_diagram_csv",
    "write_matrix_csv",
    "write_pairs_csv",
    "write_pgm",
    "write_spectrum_csv",
    "write_triples_csv",
]
