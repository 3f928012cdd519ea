"""Provider abstraction: anything that can score a post produces a ScoreBlock."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Protocol, runtime_checkable

from forumfuse.core.types import Post
from forumfuse.errors import ValidationError
from forumfuse.fusion.types import ScoreBlock


@runtime_checkable
class ScoreProvider(Protocol):
    """Structural interface all providers satisfy."""

    provider_id: str

    def score(self, post: Post) -> ScoreBlock:
        """Return one ScoreVector per schema dimension for the post."""
        ...


@dataclass(frozen=True)
class ProviderDescriptor:
    """Declarative provider configuration, e.g. from a config file.

    ``kind`` is one of ``local``, ``llm``, ``replay``, ``mock``; ``config``
    holds kind-specific settings.
    """

    provider_id: str
    kind: str
    config: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.provider_id:
            raise ValidationError("provider_id must be non-empty")
        if not self.kind:
            raise ValidationError("provider kind must be non-empty")


_FACTORIES: dict[str, Callable[[ProviderDescriptor], ScoreProvider]] = {}


def register_provider_kind(kind: str, factory: Callable[[ProviderDescriptor], ScoreProvider]) -> None:
    _FACTORIES[kind] = factory


def build_provider(descriptor: ProviderDescriptor) -> ScoreProvider:
    """Instantiate a provider from its descriptor."""
    try:
        factory = _FACTORIES[descriptor.kind]
    except KeyError:
        raise ValidationError(
            f"unknown provider kind {descriptor.kind!r}; registered: {sorted(_FACTORIES)}"
        ) from None
    return factory(descriptor)
