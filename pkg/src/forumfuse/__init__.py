"""forumfuse: forum curation by Bayesian fusion of multidimensional post classifiers.

Subpackages:
    core        domain types, ingestion, binarization, splits
    fusion      combination rules over provider score distributions
    providers   score providers (local naive Bayes, LLM client, replay, mock)
    evaluation  precision/recall/F1 metrics and the experiment harness
    engine      the curation state machine, knowledge base and event log
    service     HTTP API exposing the engine
"""

__version__ = "0.1.0"

SCHEMA_VERSION = "1"
