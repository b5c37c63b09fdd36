from enhancer.metrics.comparison import PenaltyComparison, SeedComparison, compare_penalties
from enhancer.metrics.evaluation import (
    CSV_COLUMNS,
    ClipScore,
    Enhancer,
    EvalReport,
    enhance_clip,
    evaluate_corpus,
    score_clip,
    write_report_csv,
    write_report_json,
)
from enhancer.metrics.snr import global_snr, seg_snr
