"""Reference external learner for the xsit file protocol.

Consumes a split manifest (JSON), a feature table (CSV), and a labeled
inventory (CSV); trains a lightweight classifier on the train rows and
writes a results file covering every test id. It exists to demonstrate
the protocol that real video trainers plug into, so it deliberately has
no deep-learning dependencies.
"""

from .formats import SchemaError, read_features, read_labels, read_manifest, write_results
from .models import (
    fit_nearest_centroid,
    predict_linear,
    predict_nearest_centroid,
    train_linear,
)

__version__ = "0.1.0"

__all__ = [
    "SchemaError",
    "fit_nearest_centroid",
    "predict_linear",
    "predict_nearest_centroid",
    "read_features",
    "read_labels",
    "read_manifest",
    "train_linear",
    "write_results",
]
