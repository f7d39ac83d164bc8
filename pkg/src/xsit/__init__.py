"""xsit: design, split, and evaluate action-object co-occurrence experiments.

The toolkit ingests labeled (action, object) instance inventories, builds
co-occurrence count matrices, selects dense submatrices, assigns object
roles (common / unique / unseen), samples balanced training sets, freezes
train/val/test manifests with four-way test typing, and runs repeated
seeded trials with pluggable learners.
"""

from .cooc import CoocMatrix, build_cooc, marginals, parse_report, render_report
from .densify import DensifyConfig, Removal, densify, densify_summary
from .design import (
    DesignSpec,
    RoleAssignment,
    TrainingSample,
    assign_roles,
    sample_training_set,
)
from .errors import (
    ConfigError,
    DensifyError,
    DesignError,
    ParseError,
    ScoreError,
    SplitError,
    TrialError,
    XsitError,
)
from .inventory import (
    Instance,
    Inventory,
    parse_inventory,
    serialize_inventory,
    validate_inventory,
)
from .simlearner import (
    FeatureTable,
    LinearHyper,
    SynthWorldConfig,
    generate_world,
    linear_learner,
    make_linear_learner,
    memorizer_learner,
)
from .splits import SplitManifest, TestType, classify_test_type, generate_splits
from .trials import (
    AggregateReport,
    GridAxes,
    GridResult,
    TrialResult,
    aggregate,
    make_external_learner,
    run_grid,
    run_trials,
    score_predictions,
)

__version__ = "0.1.0"

__all__ = [
    "AggregateReport",
    "ConfigError",
    "CoocMatrix",
    "DensifyConfig",
    "DensifyError",
    "DesignError",
    "DesignSpec",
    "FeatureTable",
    "GridAxes",
    "GridResult",
    "Instance",
    "Inventory",
    "LinearHyper",
    "ParseError",
    "Removal",
    "RoleAssignment",
    "ScoreError",
    "SplitError",
    "SplitManifest",
    "SynthWorldConfig",
    "TestType",
    "TrainingSample",
    "TrialError",
    "TrialResult",
    "XsitError",
    "aggregate",
    "assign_roles",
    "build_cooc",
    "classify_test_type",
    "densify",
    "densify_summary",
    "generate_splits",
    "generate_world",
    "linear_learner",
    "make_external_learner",
    "make_linear_learner",
    "marginals",
    "memorizer_learner",
    "parse_inventory",
    "parse_report",
    "render_report",
    "run_grid",
    "run_trials",
    "sample_training_set",
    "score_predictions",
    "serialize_inventory",
    "validate_inventory",
]
