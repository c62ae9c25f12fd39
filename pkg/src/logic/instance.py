"""
Declarative instance files.

One flat JSON document, versioned by `schema_version`. Every object is checked
for unknown keys, every name is resolved against the letters or elements it
refers to, and unresolved names come back with the closest known spellings.
"""
from __future__ import annotations

import logging
from logging.handlers import RotatingFileHandler
from dataclasses import dataclass, field
from datetime import datetime
from fractions import Fraction
from typing import Any, Dict, List, Optional

from src.logic.bd import BDPresentation, FreeBVData, free_closed_sector
from src.logic.config import Config, reject_unknown
from src.logic.element import Element, parse_scalar
from src.logic.errors import InstanceError
from src.logic.feynman import ContractionKernel
from src.logic.graded import GradedSpace, Letter
from src.logic.helpers import CAMPAIGNS, LOG_FILE, SCHEMA_VERSION
from src.logic.indexer import NameIndex
from src.logic.report import digest

logger = logging.getLogger(__name__)
logger.addHandler(RotatingFileHandler(
    LOG_FILE, maxBytes=1024*1024*5, backupCount=5, encoding="utf-8"
))
logger.setLevel(logging.INFO)

TOP_FIELDS = ("schema_version", "name", "config", "campaigns", "closed", "kernel", "w",
              "elements", "samples", "sweep", "evaluations")
CLOSED_FIELDS = ("letters", "d1", "b1", "omega")
W_FIELDS = ("name", "letters", "differential", "bracket")
DEFAULT_SAMPLES = {"bvinf": 200, "key_lemma": 100, "bd_axioms": 50, "linfty": 10, "chain": 8}
DEFAULT_SWEEP = {"max_g": 2, "max_n": 4, "max_m": 3, "max_k": 3, "max_half_edges": 10}
MAPS = ("K", "oc")


def _resolve(index: NameIndex, name: Any, what: str):
    if not isinstance(name, str):
        raise InstanceError(f"{what} name must be a string, got {name!r}")
    key = index.resolve(name)
    if key is None:
        hint = index.suggest(name)
        logger.error(f"[Instance][{datetime.now()}] unresolved {what} {name!r}")
        raise InstanceError(f"Unknown {what} {name!r}" + (f" (did you mean {', '.join(hint)}?)" if hint else ""))
    return index.by_name[key]


def _scalar(value: Any, where: str) -> Fraction:
    try:
        return parse_scalar(value)
    except (ValueError, TypeError, ZeroDivisionError) as e:
        raise InstanceError(f"{where}: bad coefficient {value!r}") from e


def _int(value: Any, where: str) -> int:
    if type(value) is not int:
        raise InstanceError(f"{where} must be an integer, got {value!r}")
    return value


def parse_letters(items: Any, where: str) -> GradedSpace:
    if not isinstance(items, list) or not items:
        raise InstanceError(f"{where}.letters must be a nonempty list")
    letters = []
    for k, item in enumerate(items):
        reject_unknown(item, ("name", "degree"), f"{where}.letters[{k}]")
        if not isinstance(item.get("name"), str) or not item["name"]:
            raise InstanceError(f"{where}.letters[{k}].name must be a nonempty string")
        letters.append(Letter(item["name"], _int(item.get("degree"), f"{where}.letters[{k}].degree")))
    try:
        return GradedSpace(letters)
    except ValueError as e:
        raise InstanceError(f"{where}: {e}") from e


def letter_index(space: GradedSpace) -> NameIndex:
    return NameIndex({l.name: l for l in space.letters})


def parse_element(data: Any, space: GradedSpace, d: int, where: str) -> Element:
    reject_unknown(data, ("terms",), where)
    if not isinstance(data.get("terms", []), list):
        raise InstanceError(f"{where}.terms must be a list")
    index = letter_index(space)
    out = Element.zero(space, d)
    for k, term in enumerate(data.get("terms", [])):
        spot = f"{where}.terms[{k}]"
        reject_unknown(term, ("word", "gamma", "coef"), spot)
        word = term.get("word", [])
        if not isinstance(word, list):
            raise InstanceError(f"{spot}.word must be a list of letter names")
        gamma = _int(term.get("gamma", 0), f"{spot}.gamma")
        if gamma < 0:
            raise InstanceError(f"{spot}.gamma must be >= 0")
        letters = [_resolve(index, name, "letter") for name in word]
        out = out + Element.monomial(space, d, letters, gamma, _scalar(term.get("coef", 1), spot))
    return out


def _linear_part(data: Any, space: GradedSpace, d: int, where: str) -> Dict[Letter, Element]:
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise InstanceError(f"{where} must map letter names to elements")
    index = letter_index(space)
    return {_resolve(index, name, "letter"): parse_element(e, space, d, f"{where}.{name}") for name, e in data.items()}


def _pairs(items: Any, space: GradedSpace, where: str) -> Dict[tuple, Fraction]:
    if items is None:
        return {}
    if not isinstance(items, list):
        raise InstanceError(f"{where} must be a list of [a, b, value] triples")
    index = letter_index(space)
    out = {}
    for k, item in enumerate(items):
        if not isinstance(item, list) or len(item) != 3:
            raise InstanceError(f"{where}[{k}] must be [a, b, value]")
        a, b = _resolve(index, item[0], "letter"), _resolve(index, item[1], "letter")
        out[(a, b)] = _scalar(item[2], f"{where}[{k}]")
    return out


def parse_closed(data: Any, d: int) -> FreeBVData:
    reject_unknown(data, CLOSED_FIELDS, "closed")
    space = parse_letters(data.get("letters"), "closed")
    try:
        return FreeBVData(space, d, _linear_part(data.get("d1"), space, d, "closed.d1"),
                          _linear_part(data.get("b1"), space, d, "closed.b1"),
                          _pairs(data.get("omega"), space, "closed.omega"))
    except InstanceError:
        raise
    except ValueError as e:
        raise InstanceError(f"closed: {e}") from e


def parse_kernel(data: Any, space: GradedSpace, d: int) -> ContractionKernel:
    reject_unknown(data, ("entries",), "kernel")
    try:
        return ContractionKernel(space, d, _pairs(data.get("entries"), space, "kernel.entries"))
    except InstanceError:
        raise
    except ValueError as e:
        raise InstanceError(f"kernel: {e}") from e


def parse_w(data: Any, config: Config) -> BDPresentation:
    reject_unknown(data, W_FIELDS, "w")
    space = parse_letters(data.get("letters"), "w")
    d = config.d
    differential = _linear_part(data.get("differential"), space, d, "w.differential")
    brackets = data.get("bracket", [])
    if not isinstance(brackets, list):
        raise InstanceError("w.bracket must be a list")
    index = letter_index(space)
    bracket = {}
    for k, item in enumerate(brackets):
        reject_unknown(item, ("a", "b", "value"), f"w.bracket[{k}]")
        a, b = _resolve(index, item.get("a"), "letter"), _resolve(index, item.get("b"), "letter")
        bracket[(a, b)] = parse_element(item.get("value", {}), space, d, f"w.bracket[{k}].value")
    try:
        return BDPresentation(space, d, differential, bracket, config.window, data.get("name", "W"))
    except ValueError as e:
        raise InstanceError(f"w: {e}") from e


@dataclass
class Evaluation:
    name: str
    map: str
    inputs: List[str]


@dataclass
class Instance:
    name: str
    config: Config
    campaigns: List[str] = field(default_factory=list)
    closed: Optional[FreeBVData] = None
    kernel: Optional[ContractionKernel] = None
    w: Optional[BDPresentation] = None
    elements: Dict[str, Element] = field(default_factory=dict)
    samples: Dict[str, int] = field(default_factory=lambda: dict(DEFAULT_SAMPLES))
    sweep: Dict[str, int] = field(default_factory=lambda: dict(DEFAULT_SWEEP))
    evaluations: List[Evaluation] = field(default_factory=list)
    source: Dict[str, Any] = field(default_factory=dict)

    @property
    def space(self) -> Optional[GradedSpace]:
        """Union of the closed and W letters; elements live here."""
        spaces = [s for s in (self.closed.space if self.closed else None, self.w.space if self.w else None) if s]
        if not spaces:
            return None
        return spaces[0] if len(spaces) == 1 else spaces[0].union(spaces[1])

    def closed_presentation(self) -> Optional[BDPresentation]:
        return free_closed_sector(self.closed, self.config.window) if self.closed else None

    def with_config(self, config: Config) -> "Instance":
        return Instance.from_dict(self.source, config)

    def digest(self) -> str:
        return digest({"instance": self.source, "config": self.config.to_dict()})

    def element(self, name: str) -> Element:
        return _resolve(NameIndex(self.elements), name, "element")

    @classmethod
    def from_dict(cls, data: Dict[str, Any], config: Optional[Config] = None) -> "Instance":
        """Parse and validate; `config` replaces the file's config section when given."""
        reject_unknown(data, TOP_FIELDS, "instance")
        version = data.get("schema_version")
        if version != SCHEMA_VERSION:
            logger.error(f"[Instance][{datetime.now()}] schema_version {version!r}")
            raise InstanceError(f"schema_version must be {SCHEMA_VERSION}, got {version!r}")
        config = config or Config.from_dict(data.get("config", {}))

        campaigns = data.get("campaigns", [])
        if not isinstance(campaigns, list):
            raise InstanceError("campaigns must be a list")
        campaign_index = NameIndex({c: c for c in CAMPAIGNS})
        campaigns = [_resolve(campaign_index, c, "campaign") for c in campaigns]

        closed = parse_closed(data["closed"], config.d) if "closed" in data else None
        kernel = None
        if "kernel" in data:
            if closed is None:
                raise InstanceError("kernel needs a closed section to refer to")
            kernel = parse_kernel(data["kernel"], closed.space, config.d)
        w = parse_w(data["w"], config) if "w" in data else None
        if closed is not None and w is not None and set(closed.space.names()) & set(w.space.names()):
            raise InstanceError("closed and w letters must have distinct names")

        out = cls(str(data.get("name", "")), config, campaigns, closed, kernel, w, source=data)

        samples = data.get("samples", {})
        reject_unknown(samples, DEFAULT_SAMPLES, "samples")
        out.samples.update({k: _int(v, f"samples.{k}") for k, v in samples.items()})
        sweep = data.get("sweep", {})
        reject_unknown(sweep, DEFAULT_SWEEP, "sweep")
        out.sweep.update({k: _int(v, f"sweep.{k}") for k, v in sweep.items()})

        elements = data.get("elements", {})
        if not isinstance(elements, dict):
            raise InstanceError("elements must map names to elements")
        if elements and out.space is None:
            raise InstanceError("elements need a closed or w section for their letters")
        for name, e in elements.items():
            value = parse_element(e, out.space, config.d, f"elements.{name}")
            for (word, g), _ in value.terms():
                if not config.window.admits((word, g)):
                    logger.error(f"[Instance][{datetime.now()}] element {name} leaves the window")
                    raise InstanceError(f"elements.{name}: window overflow (word length {len(word)}, gamma {g}, "
                                        f"window {config.window_words}/{config.window_gamma})")
            out.elements[name] = value

        evaluations = data.get("evaluations", [])
        if not isinstance(evaluations, list):
            raise InstanceError("evaluations must be a list")
        for k, item in enumerate(evaluations):
            reject_unknown(item, ("name", "map", "inputs"), f"evaluations[{k}]")
            if item.get("map") not in MAPS:
                raise InstanceError(f"evaluations[{k}].map must be one of {MAPS}")
            inputs = item.get("inputs")
            if not isinstance(inputs, list) or not inputs:
                raise InstanceError(f"evaluations[{k}].inputs must be a nonempty list of element names")
            for name in inputs:
                out.element(name)
            out.evaluations.append(Evaluation(str(item.get("name", f"eval{k}")), item["map"], list(inputs)))
        return out
