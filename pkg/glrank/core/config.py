"""Run configuration, resource caps and cache directory resolution."""

import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, Optional

from ..errors import InvalidInputError
from ..qseries import prime_power

CACHE_ENV = "GLRANK_CACHE_DIR"
DEFAULT_CACHE_DIR = Path.home() / ".cache" / "glrank"


@dataclass(frozen=True)
class Caps:
    """Upper limits every expensive computation checks before starting."""

    group_order: int = 200000
    partition_weight: int = 20
    class_count: int = 400
    field_order: int = 64
    transvections: int = 200000
    irreps: int = 20000

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not isinstance(value, int) or value < 1:
                raise InvalidInputError(f"Cap {f.name} must be a positive integer, got {value!r}")

    def with_overrides(self, overrides: Dict[str, Optional[int]]) -> "Caps":
        known = {f.name for f in fields(self)}
        unknown = set(overrides) - known
        if unknown:
            raise InvalidInputError(f"Unknown caps: {', '.join(sorted(unknown))}")
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})


def resolve_cache_dir(explicit: Optional[str] = None) -> Path:
    """--cache-dir, then $GLRANK_CACHE_DIR, then ~/.cache/glrank."""
    if explicit:
        return Path(explicit).expanduser()
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env).expanduser()
    return DEFAULT_CACHE_DIR


@dataclass
class RunConfig:
    """Everything a subcommand needs, validated once before dispatch."""

    subcommand: str
    n: Optional[int] = None
    q: Optional[int] = None
    k: Optional[int] = None
    group: str = "GL"
    partition: Optional[Any] = None
    irrep: Optional[Dict[str, Any]] = None
    caps: Caps = field(default_factory=Caps)
    cache_dir: Optional[Path] = None
    use_cache: bool = True
    output: Optional[Path] = None
    format: str = "json"
    steps: int = 1
    mode: str = "exact"
    trials: int = 1000
    seed: int = 0
    workers: int = 1
    level: str = "quick"
    progress: bool = False
    extra: Dict[str, Any] = field(default_factory=dict)

    @property
    def p(self) -> Optional[int]:
        return None if self.q is None else prime_power(self.q)[0]

    @property
    def m(self) -> Optional[int]:
        return None if self.q is None else prime_power(self.q)[1]

    def validate(self) -> "RunConfig":
        """Check caps, q, numeric ranges and the output location.

        Raises:
            InvalidInputError: On the first invalid setting
        """
        if self.q is not None:
            prime_power(self.q)
        if self.n is not None and self.n < 0:
            raise InvalidInputError(f"n must be non-negative, got {self.n}")
        if self.format not in ("json", "csv"):
            raise InvalidInputError(f"Unknown format {self.format!r}; expected json or csv")
        for name in ("trials", "workers"):
            if getattr(self, name) < 1:
                raise InvalidInputError(f"{name} must be positive, got {getattr(self, name)}")
        if self.steps < 0:
            raise InvalidInputError(f"steps must be non-negative, got {self.steps}")
        if self.output is not None:
            parent = Path(self.output).expanduser().resolve().parent
            if not parent.is_dir() or not os.access(parent, os.W_OK):
                raise InvalidInputError(f"Output directory {parent} is not writable")
        if self.use_cache and self.cache_dir is None:
            self.cache_dir = resolve_cache_dir()
        return self
