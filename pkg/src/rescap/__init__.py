"""Toolkit for measuring national research capability from bibliographic records.

The pipeline: ingest bibliographic records with per-author country codes,
split publication credit fractionally across countries, fit a time-sliced
topic model over abstracts, group topics into topical clusters with ward
agglomeration over Jensen-Shannon distances, compute normalized revealed
comparative advantage (NRCA) per country and cluster, and estimate a
gravity model of international collaboration that includes the Jaccard
capability distance between countries' advantage profiles.

Everything runs end-to-end on synthetic corpora with planted ground truth
(see :mod:`rescap.synth`) or on user-supplied JSON Lines corpora.
"""

from rescap.corpus import (
    PaperRecord,
    CountryCredit,
    Vocabulary,
    TokenizedCorpus,
    ingest,
    fractional_credit,
    build_vocabulary,
    tokenize,
    collaboration_ratio,
)
from rescap.topics import (
    StaticLda,
    DynamicTopicModel,
    TopicCountSelector,
    TopicModelState,
    top_words,
)
from rescap.taxonomy import (
    Dendrogram,
    ClusterAssignment,
    js_distance,
    topic_distance_matrix,
    ward_cluster,
    cut_tree,
)
from rescap.capability import (
    CapabilityTensor,
    NrcaTensor,
    build_capability,
    nrca,
    capability_distance,
    rank_series,
    loess_smooth,
    country_filter,
)
from rescap.collaboration import (
    CollaborationTensor,
    paper_collab_matrix,
    build_collab_tensor,
)
from rescap.gravity import (
    GravityObservation,
    RegressionResult,
    haversine_km,
    build_observations,
    fit_ols_fixed_effects,
    solve_least_squares,
)
from rescap.synth import SynthSpec, generate_corpus, generate_gravity_data

__version__ = "0.1.0"

__all__ = [
    "PaperRecord",
    "CountryCredit",
    "Vocabulary",
    "TokenizedCorpus",
    "ingest",
    "fractional_credit",
    "build_vocabulary",
    "tokenize",
    "collaboration_ratio",
    "StaticLda",
    "DynamicTopicModel",
    "TopicCountSelector",
    "TopicModelState",
    "top_words",
    "Dendrogram",
    "ClusterAssignment",
    "js_distance",
    "topic_distance_matrix",
    "ward_cluster",
    "cut_tree",
    "CapabilityTensor",
    "NrcaTensor",
    "build_capability",
    "nrca",
    "capability_distance",
    "rank_series",
    "loess_smooth",
    "country_filter",
    "CollaborationTensor",
    "paper_collab_matrix",
    "build_collab_tensor",
    "GravityObservation",
    "RegressionResult",
    "haversine_km",
    "build_observations",
    "fit_ols_fixed_effects",
    "solve_least_squares",
    "SynthSpec",
    "generate_corpus",
    "generate_gravity_data",
    "__version__",
]
