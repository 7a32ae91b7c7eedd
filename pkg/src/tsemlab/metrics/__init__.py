"""Accuracy, faithfulness, causality, spatiotemporality and ranking metrics."""

from .causality import (
    AXES,
    CausalityRecord,
    CausalityReport,
    cascade_permutations,
    cascade_randomize,
    cascade_stack,
    causality_report,
    ensure_trained,
)
from .classification import ConfusionCounts, accuracy, accuracy_score, chance_threshold, confusion_counts
from .faithfulness import (
    CurvePoint,
    FaithfulnessSample,
    average_drop,
    average_increase,
    curve_auc,
    delete_random_fraction,
    delete_top_fraction,
    deletion_curve,
    deletion_curves,
    faithfulness_samples,
    insertion_curve,
    insertion_curves,
    mask_by_explanation,
    saliency_order,
)
from .ranking import CriticalDifference, RankTable, bonferroni_dunn_q, critical_difference, rank_table
from .spatiotemporal import spatiality_check, spatiotemporality_check, temporality_check
from .stats import ChiSquareTest, Correlation, chi_square, pearson, pearson_rows

__all__ = [
    "AXES",
    "CausalityRecord",
    "CausalityReport",
    "ChiSquareTest",
    "ConfusionCounts",
    "Correlation",
    "CriticalDifference",
    "CurvePoint",
    "FaithfulnessSample",
    "RankTable",
    "accuracy",
    "accuracy_score",
    "average_drop",
    "average_increase",
    "bonferroni_dunn_q",
    "cascade_permutations",
    "cascade_randomize",
    "cascade_stack",
    "causality_report",
    "chance_threshold",
    "chi_square",
    "confusion_counts",
    "critical_difference",
    "curve_auc",
    "delete_random_fraction",
    "delete_top_fraction",
    "deletion_curve",
    "deletion_curves",
    "ensure_trained",
    "faithfulness_samples",
    "insertion_curve",
    "insertion_curves",
    "mask_by_explanation",
    "pearson",
    "pearson_rows",
    "rank_table",
    "saliency_order",
    "spatiality_check",
    "spatiotemporality_check",
    "temporality_check",
]
