"""factpipe: fact-check article harvesting, verdict harmonization, and
multi-class veracity/domain text classification."""

from .classifier import (
    DataError,
    ModelParams,
    Prediction,
    TrainConfig,
    TrainingHistory,
    load_model,
    loss_and_grad,
    predict,
    predict_many,
    save_model,
    softmax,
    train,
)
from .encoder import (
    EncoderBackendRef,
    EncoderConnectionError,
    EncoderError,
    EncoderProtocolError,
    embed_remote,
)
from .ingest import (
    ArticleRecord,
    CrawlReport,
    FetchResult,
    PoliteFetcher,
    SiteProfile,
    canonicalize_url,
    crawl_site,
    dedupe,
    extract_article,
    load_site_profiles,
)
from .labels import (
    DomainClass,
    LabeledExample,
    MappingTable,
    Unmapped,
    UnmappedReport,
    VerdictClass,
    canonicalize_label,
    load_default_table,
    load_mapping_table,
    merge_corpus,
    normalize_domain,
    normalize_verdict,
    save_mapping_table,
)
from .metrics import ConfusionMatrix, MetricsReport, confusion, format_report, score
from .textprep import (
    FeatureVector,
    Vocabulary,
    build_vocabulary,
    clean_text,
    load_vocabulary,
    save_vocabulary,
    tokenize,
    vectorize_tfidf,
)

__version__ = "0.1.0"
