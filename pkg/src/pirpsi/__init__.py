"""Multi-server private retrieval with side information, audited exactly.

A client holding M of K replicated messages retrieves one more from N
non-colluding servers without revealing which message it wants or which
ones it holds, at the information-theoretically optimal download rate.
The package implements the scheme end to end (query generation, server
answering, decoding) over GF(q) for prime q, and proves its properties on
concrete parameter tuples by exhaustive weighted enumeration with exact
rational arithmetic: privacy, recoverability, rate, and an answer-profile
census checked against a golden reference table.
"""

from .auditor import (
    DEFAULT_BUDGET,
    BudgetExceeded,
    CensusReport,
    MonteCarloReport,
    PrivacyReport,
    QueryDistribution,
    RateReport,
    RecoverabilityReport,
    all_pairs,
    answer_appearance_probability,
    answer_set_census,
    canonical_pair,
    capacity,
    check_privacy,
    check_rate,
    check_recoverability,
    closed_form_query_prob,
    default_audit_grid,
    estimate_enumeration_cost,
    exact_query_distribution,
    exact_rate,
    expected_download_symbols,
    monte_carlo_audit,
)
from .core import (
    DemandSideInfo,
    Field,
    Message,
    MessageStore,
    SchemeParams,
    get_subpacket,
    support_size,
    validate_params,
)
from .distributions import (
    PijTable,
    lemma_grid,
    m_coeff,
    p_ij,
    verify_alternating_identity,
    verify_pij_distribution,
    verify_poly_identity,
    verify_summij,
)
from .protocol import (
    Answer,
    SessionResult,
    SessionState,
    answer_query,
    decode,
    decode_answer,
    decode_query,
    encode_answer,
    encode_query,
    generate_queries,
    run_session,
)
from .randomness import EnumeratorSource, RandomSource, RandomTape, SamplerSource, enumerate_paths

__version__ = "0.1.0"

__all__ = [
    "Answer",
    "BudgetExceeded",
    "CensusReport",
    "DEFAULT_BUDGET",
    "DemandSideInfo",
    "EnumeratorSource",
    "Field",
    "Message",
    "MessageStore",
    "MonteCarloReport",
    "PijTable",
    "PrivacyReport",
    "QueryDistribution",
    "RandomSource",
    "RandomTape",
    "RateReport",
    "RecoverabilityReport",
    "SamplerSource",
    "SchemeParams",
    "SessionResult",
    "SessionState",
    "all_pairs",
    "answer_appearance_probability",
    "answer_query",
    "answer_set_census",
    "canonical_pair",
    "capacity",
    "check_privacy",
    "check_rate",
    "check_recoverability",
    "closed_form_query_prob",
    "decode",
    "decode_answer",
    "decode_query",
    "default_audit_grid",
    "encode_answer",
    "encode_query",
    "enumerate_paths",
    "estimate_enumeration_cost",
    "exact_query_distribution",
    "exact_rate",
    "expected_download_symbols",
    "generate_queries",
    "get_subpacket",
    "lemma_grid",
    "m_coeff",
    "monte_carlo_audit",
    "p_ij",
    "run_session",
    "support_size",
    "validate_params",
    "verify_alternating_identity",
    "verify_pij_distribution",
    "verify_poly_identity",
    "verify_summij",
    "__version__",
]
