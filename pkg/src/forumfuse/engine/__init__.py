"""Forum curation engine: thresholded responses and tutor referrals."""
from .config import (
    CONFIDENCE_FLOOR,
    DEFAULT_PRIORITY_WEIGHTS,
    DEFAULT_REFERRAL_GOAL,
    EngineConfig,
)
from .engine import (
    CurationEngine,
    CurationReport,
    build_report,
    compute_priority,
    replay_event_log,
)
from .events import EventLog, dump_event, make_event, read_events
from .kb import (
    DEFAULT_FALLBACK_TEXT,
    WILDCARD_COURSE,
    ComposedResponse,
    KbEntry,
    KnowledgeBase,
)
from .state import PostState, PostStatus, ReferralItem, Resolution, StateStore

__all__ = [
    "CONFIDENCE_FLOOR",
    "ComposedResponse",
    "CurationEngine",
    "CurationReport",
    "DEFAULT_FALLBACK_TEXT",
    "DEFAULT_PRIORITY_WEIGHTS",
    "DEFAULT_REFERRAL_GOAL",
    "EngineConfig",
    "EventLog",
    "KbEntry",
    "KnowledgeBase",
    "PostState",
    "PostStatus",
    "ReferralItem",
    "Resolution",
    "StateStore",
    "WILDCARD_COURSE",
    "build_report",
    "compute_priority",
    "dump_event",
    "make_event",
    "read_events",
    "replay_event_log",
]
