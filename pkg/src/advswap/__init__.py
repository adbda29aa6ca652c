"""Black-box adversarial attacks on text classifiers.

Given a model reachable only through probability queries, the attack
ranks words by deletion impact and greedily substitutes cosine-nearest
synonyms under part-of-speech and sentence-similarity constraints until
the prediction flips. Campaign tooling measures after-attack accuracy,
perturbation rate, semantic similarity, query cost, transferability,
and exports adversaries for retraining.
"""

from .attack import (
    AttackConfig,
    AttackResult,
    Substitution,
    attack,
    choose_replacement,
    extract_candidates,
    filter_by_similarity,
)
from .embeddings import EmbeddingStore, SynonymCandidate, cosine, load_embeddings, nearest_synonyms
from .errors import (
    AdvswapError,
    ConfigurationError,
    ContractError,
    EncodingError,
    FormatError,
    RemoteError,
    TrainingError,
    TransportError,
)
from .evaluation import (
    CampaignReport,
    CorpusRecord,
    LabeledCorpus,
    export_adversarial_training_set,
    load_corpus,
    perturbation_rate,
    run_campaign,
    save_corpus,
    transferability_matrix,
)
from .importance import ImportanceScore, importance_scores, rank_words
from .similarity import (
    AverageEmbeddingEncoder,
    RemoteEncoder,
    SentenceEncoder,
    SimilarityScore,
    encode_average,
    remote_encode,
    sentence_similarity,
)
from .target import (
    BowClassifier,
    CountingModel,
    LabelDistribution,
    QueryCounter,
    RemoteScorer,
    TargetModel,
    entailment_compose,
    entailment_split,
    query_text,
    remote_scorer,
    train_bow_classifier,
)
from .text import (
    Document,
    POSTagger,
    Token,
    annotate,
    bundled_stopwords,
    detokenize,
    is_stop,
    load_stopwords,
    tokenize,
)

__version__ = "0.1.0"
