from .features import FEATURE_NAMES, TokenFeatures, feature_matrix, rank_by_score, token_features, training_rows
from .forest import Forest, Tree, best_split, fit_forest, fit_forest_arrays, fit_tree, forest_scores, gini, rank_forest
from .statistical import BugProbTable, fit_statistics, rank_statistical, statistical_scores

__all__ = [
    "FEATURE_NAMES", "BugProbTable", "Forest", "TokenFeatures", "Tree", "best_split", "feature_matrix",
    "fit_forest", "fit_forest_arrays", "fit_statistics", "fit_tree", "forest_scores", "gini",
    "rank_by_score", "rank_forest", "rank_statistical", "statistical_scores", "token_features",
    "training_rows",
]
