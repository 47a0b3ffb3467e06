"""Limited-attention PageRank and Alpha-Centrality, exact and by residual push."""
from .errors import (
    ConditioningError,
    ConfigError,
    DivergenceError,
    EmptyGraph,
    EmptyLog,
    InsufficientData,
    LACentralityError,
    NotConverged,
    ParamError,
    ParseError,
    ShapeError,
    SingularSystem,
)
from .evaluation import (
    BroadcastLog,
    InfluenceScore,
    Record,
    SweepResult,
    correlation_report,
    delta_sweep,
    empirical_influence,
    rms_error,
    simulate_la_cascades,
    spearman,
)
from .exact import (
    CentralityParams,
    Measure,
    ScoreVector,
    Starting,
    alpha_centrality_exact,
    dense_solve_oracle,
    la_alpha_centrality_exact,
    la_pagerank_exact,
    pagerank_exact,
    spectral_radius,
)
from .graph import (
    ConditioningMode,
    DegreeConditioning,
    DirectedGraph,
    condition_degrees,
    format_edge_list,
    max_degrees,
    parse_edge_list,
    read_edge_list,
    transpose,
)
from .push import (
    PushStats,
    approx_alpha_centrality,
    approx_la_alpha_centrality,
    approx_la_pagerank,
    approximate_push,
    verify_lemma1,
)

__version__ = "0.1.0"
