from __future__ import annotations

import logging
from logging.handlers import RotatingFileHandler
from dataclasses import asdict, dataclass, fields, replace
from datetime import datetime
from typing import Any, Dict

from src.logic.bd import TruncationWindow
from src.logic.bijection import DEFECT_MODES
from src.logic.errors import InstanceError
from src.logic.helpers import DEFAULT_CONFIG, LOG_FILE
from src.logic.indexer import NameIndex

logger = logging.getLogger(__name__)
logger.addHandler(RotatingFileHandler(
    LOG_FILE, maxBytes=1024*1024*5, backupCount=5, encoding="utf-8"
))
logger.setLevel(logging.INFO)


def reject_unknown(data: Dict[str, Any], allowed, where: str) -> None:
    """Raise InstanceError naming the first unknown key and its closest allowed spellings."""
    if not isinstance(data, dict):
        raise InstanceError(f"{where}: expected an object, got {type(data).__name__}")
    index = NameIndex({name: name for name in allowed})
    for key in data:
        if key not in allowed:
            hint = index.suggest(key)
            logger.error(f"[Config][{datetime.now()}] unknown field {where}.{key}")
            raise InstanceError(f"{where}: unknown field {key!r}" + (f" (did you mean {', '.join(hint)}?)" if hint else ""))


@dataclass(frozen=True)
class Config:
    d: int = DEFAULT_CONFIG["d"]
    window_words: int = DEFAULT_CONFIG["window_words"]
    window_gamma: int = DEFAULT_CONFIG["window_gamma"]
    seed: int = DEFAULT_CONFIG["seed"]
    stable_graphs: bool = DEFAULT_CONFIG["stable_graphs"]
    defect_mode: str = DEFAULT_CONFIG["defect_mode"]
    jobs: int = DEFAULT_CONFIG["jobs"]
    record_timings: bool = DEFAULT_CONFIG["record_timings"]

    def __post_init__(self) -> None:
        for f in fields(self):
            value = getattr(self, f.name)
            expected = type(DEFAULT_CONFIG[f.name])
            # bool is an int subclass; keep the two apart
            if type(value) is not expected:
                raise InstanceError(f"config.{f.name} must be {expected.__name__}, got {value!r}")
        if self.window_words < 1 or self.window_gamma < 1:
            raise InstanceError(f"Window caps must be >= 1, got ({self.window_words}, {self.window_gamma})")
        if self.jobs < 1:
            raise InstanceError(f"config.jobs must be >= 1, got {self.jobs}")
        if self.defect_mode not in DEFECT_MODES:
            raise InstanceError(f"config.defect_mode must be one of {DEFECT_MODES}, got {self.defect_mode!r}")

    @property
    def window(self) -> TruncationWindow:
        return TruncationWindow(self.window_words, self.window_gamma)

    def overridden(self, **changes: Any) -> "Config":
        """Copy with every non-None change applied; command line flags come in this way."""
        return replace(self, **{k: v for k, v in changes.items() if v is not None})

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Config":
        reject_unknown(data, DEFAULT_CONFIG, "config")
        return cls(**data)
