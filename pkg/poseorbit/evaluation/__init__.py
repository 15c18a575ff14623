from .pose_report import PoseReport, FoldFit, PoseEvaluator, infer_poses, align_poses, fit_fold, fold_score, \
    coincidence_gap, circular_mean, evaluate_model
from .plots import emit_plots

__all__ = ['PoseReport', 'FoldFit', 'PoseEvaluator', 'infer_poses', 'align_poses', 'fit_fold', 'fold_score',
           'coincidence_gap', 'circular_mean', 'evaluate_model', 'emit_plots']
