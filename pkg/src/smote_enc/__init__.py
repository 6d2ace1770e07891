"""Minority oversampling for mixed nominal/continuous data.

SMOTE, SMOTE-NC and SMOTE-ENC samplers plus the evaluation harness used to
compare them (random forest, threshold metrics, ROC/PR curves, repeated
stratified CV and paired t-tests).
"""

from .tabular import ColumnSchema, Dataset, GeneratorSpec, load_csv, write_csv, generate_synthetic
from .encoding import EncodingModel, LabelStats, fit_encoding, median_minority_std
from .samplers import SamplerConfig, ResampleResult, resample, smote, smote_nc, smote_enc, one_hot_smote

__version__ = "0.1.0"

__all__ = [
    "ColumnSchema",
    "Dataset",
    "GeneratorSpec",
    "load_csv",
    "write_csv",
    "generate_synthetic",
    "EncodingModel",
    "LabelStats",
    "fit_encoding",
    "median_minority_std",
    "SamplerConfig",
    "ResampleResult",
    "resample",
    "smote",
    "smote_nc",
    "smote_enc",
    "one_hot_smote",
]
