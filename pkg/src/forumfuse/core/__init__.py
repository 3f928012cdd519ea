"""Domain types, dataset ingestion, binarization and split construction."""

from forumfuse.core.schema import (
    DEFAULT_SCHEMA,
    DIMENSION_NAMES,
    SCHEMA_VERSION,
    Area,
    DimensionSchema,
    DimensionSpec,
    parse_area,
)
from forumfuse.core.types import (
    DatasetSplit,
    LabelVector,
    Post,
    RawAnnotation,
    binarize,
)
from forumfuse.core.ingest import (
    FormatProfile,
    IngestReport,
    get_profile,
    ingest_corpus,
    load_profiles,
    register_profile,
    write_corpus,
)
from forumfuse.core.splits import (
    CROSSDOMAIN,
    INTRACOURSE,
    INTRADOMAIN,
    SplitParams,
    make_splits,
)
from forumfuse.core.text import normalize_text, tokenize

__all__ = [
    "Area",
    "CROSSDOMAIN",
    "DEFAULT_SCHEMA",
    "DIMENSION_NAMES",
    "DatasetSplit",
    "DimensionSchema",
    "DimensionSpec",
    "FormatProfile",
    "INTRACOURSE",
    "INTRADOMAIN",
    "IngestReport",
    "LabelVector",
    "Post",
    "RawAnnotation",
    "SCHEMA_VERSION",
    "SplitParams",
    "binarize",
    "get_profile",
    "ingest_corpus",
    "load_profiles",
    "make_splits",
    "normalize_text",
    "parse_area",
    "register_profile",
    "tokenize",
    "write_corpus",
]
