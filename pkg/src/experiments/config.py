#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#----------------------------------------------------------------------------
# Created By: tag_distill contributors
# ---------------------------------------------------------------------------
""" Experiment configuration read from and written to .ini files """

import json
from configparser import ConfigParser, ExtendedInterpolation
from dataclasses import dataclass, field, fields, replace
from typing import Any, Dict, Iterable, Tuple, get_type_hints

from errors import ConfigError

SENSITIVITY_GRID = (0.001, 0.01, 0.1, 0.5, 1.0, 5.0, 10.0)


@dataclass(frozen=True)
class DatasetSection:
    name: str = ""
    path: str = ""
    format: str = ""
    subject: str = "paper"
    network: str = "citation network"


@dataclass(frozen=True)
class SyntheticSection:
    classCount: int = 3
    nodesPerClass: int = 200
    intraClassEdgeProb: float = 0.05
    interClassEdgeProb: float = 0.005
    noiseWordRate: float = 0.3
    seed: int = 1
    signatureVocabSize: int = 8
    wordsPerText: int = 12
    neutralVocabSize: int = 30
    confusionRate: float = 0.5


@dataclass(frozen=True)
class SplitSection:
    ratios: Tuple[float, ...] = (0.6, 0.2, 0.2)
    seed: int = 0


@dataclass(frozen=True)
class BackboneSection:
    family: str = "gcn-style"
    layers: int = 2
    hiddenDim: int = 256


@dataclass(frozen=True)
class EncoderSection:
    kind: str = "hashing-bow"
    dim: int = 1024
    modelName: str = "distilbert-base-uncased"
    maxTokensFull: int = 512
    maxTokensKeywords: int = 48


@dataclass(frozen=True)
class LlmSection:
    client: str = "oracle"
    model: str = "gpt-3.5-turbo"
    baseUrl: str = ""
    apiKeyEnv: str = "OPENAI_API_KEY"
    temperature: float = 0.0
    timeout: float = 60.0
    cacheDir: str = ""


@dataclass(frozen=True)
class AnnotationSection:
    neighborCap: int = 20
    keywordCap: int = 5
    messageCap: int = 5
    maxRetries: int = 2
    workers: int = 4
    maxFailureRate: float = 0.2


@dataclass(frozen=True)
class InterpreterSection:
    lambda1: float = 1.0
    useKeywords: bool = True
    useKeyEdges: bool = True
    useMessages: bool = True
    epochs: int = 200
    learningRate: float = 0.01
    encoderEpochs: int = 10
    encoderLearningRate: float = 1e-5
    weightDecay: float = 0.0


@dataclass(frozen=True)
class StudentSection:
    lambda2: float = 1.0
    epochs: int = 200
    learningRate: float = 0.01
    encoderEpochs: int = 10
    encoderLearningRate: float = 1e-5
    weightDecay: float = 0.0


@dataclass(frozen=True)
class AlignmentSection:
    lambda3: float = 1.0
    lambda4: float = 1.0


@dataclass(frozen=True)
class ExperimentSection:
    name: str = "run"
    seeds: Tuple[int, ...] = (0, 1, 2, 3, 4)
    outputDir: str = "output"
    workers: int = 1
    validationFraction: float = 0.1
    variants: Tuple[str, ...] = ("no-soft-labels", "no-keywords", "no-key-edges", "no-messages",
                                 "vanilla-align", "no-semantic", "no-structural")
    fractions: Tuple[float, ...] = (0.01, 0.1, 0.6, 1.0)
    subsetSeed: int = 0
    sensitivityParameter: str = "lambda3"
    sensitivityGrid: Tuple[float, ...] = SENSITIVITY_GRID
    finetuneLabelFraction: float = 1.0
    plots: bool = True


@dataclass(frozen=True)
class MiscSection:
    logLevel: str = "INFO"
    precision: str = "float32"


SECTIONS = {
    "dataset": DatasetSection,
    "synthetic": SyntheticSection,
    "split": SplitSection,
    "backbone": BackboneSection,
    "encoder": EncoderSection,
    "llm": LlmSection,
    "annotation": AnnotationSection,
    "interpreter": InterpreterSection,
    "student": StudentSection,
    "alignment": AlignmentSection,
    "experiment": ExperimentSection,
    "misc": MiscSection,
}


def _parseValue(raw: str, kind: Any, where: str) -> Any:
    try:
        if kind is bool:
            lowered = raw.strip().lower()
            if lowered in ("1", "true", "yes", "on"):
                return True
            if lowered in ("0", "false", "no", "off"):
                return False
            raise ValueError(f"not a boolean: {raw}")
        if kind is int:
            return int(raw)
        if kind is float:
            return float(raw)
        if kind is str:
            return raw
        # Tuple[...] values are JSON arrays
        itemType = kind.__args__[0]
        values = json.loads(raw)
        if not isinstance(values, list):
            raise ValueError(f"expected a JSON array, got {raw}")
        return tuple(itemType(v) for v in values)
    except (ValueError, TypeError, json.JSONDecodeError) as e:
        raise ConfigError(f"Invalid value for {where}: {e}") from e


def _formatValue(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return json.dumps(list(value))
    return str(value).replace("$", "$$")


@dataclass(frozen=True)
class ExperimentConfig:
    """
    Every setting of an experiment, one attribute per .ini section.
    Every field has a default, so an empty file is a valid configuration.
    """
    dataset: DatasetSection = field(default_factory=DatasetSection)
    synthetic: SyntheticSection = field(default_factory=SyntheticSection)
    split: SplitSection = field(default_factory=SplitSection)
    backbone: BackboneSection = field(default_factory=BackboneSection)
    encoder: EncoderSection = field(default_factory=EncoderSection)
    llm: LlmSection = field(default_factory=LlmSection)
    annotation: AnnotationSection = field(default_factory=AnnotationSection)
    interpreter: InterpreterSection = field(default_factory=InterpreterSection)
    student: StudentSection = field(default_factory=StudentSection)
    alignment: AlignmentSection = field(default_factory=AlignmentSection)
    experiment: ExperimentSection = field(default_factory=ExperimentSection)
    misc: MiscSection = field(default_factory=MiscSection)

    @staticmethod
    def fromConfigParser(parser: ConfigParser) -> 'ExperimentConfig':
        """
        Builds a config from a parsed .ini file. Missing keys keep their default.

        Parameters:
            parser: ConfigParser

        Returns:
            ExperimentConfig
        """
        unknownSections = [s for s in parser.sections() if s not in SECTIONS]
        if unknownSections:
            raise ConfigError(f"Unknown config sections {unknownSections}, expected {list(SECTIONS)}.")
        sections = {}
        for name, sectionType in SECTIONS.items():
            hints = get_type_hints(sectionType)
            values = {}
            if parser.has_section(name):
                known = {f.name.lower(): f.name for f in fields(sectionType)}
                for key in parser.options(name):
                    if key.lower() not in known:
                        raise ConfigError(f"Unknown key '{key}' in section [{name}].")
                    attribute = known[key.lower()]
                    values[attribute] = _parseValue(parser.get(name, key), hints[attribute], f"{name}.{attribute}")
            sections[name] = sectionType(**values)
        return ExperimentConfig(**sections)

    @staticmethod
    def fromFile(filepath: str) -> 'ExperimentConfig':
        parser = ConfigParser(interpolation=ExtendedInterpolation())
        if not parser.read(filepath):
            raise ConfigError(f"Config file {filepath} does not exist or is unreadable.")
        return ExperimentConfig.fromConfigParser(parser)

    def toConfigParser(self) -> ConfigParser:
        """
        Writes every field, defaults included, into a ConfigParser.
        """
        parser = ConfigParser(interpolation=ExtendedInterpolation())
        parser.optionxform = str  # type: ignore[assignment,method-assign]
        for name in SECTIONS:
            section = getattr(self, name)
            parser.add_section(name)
            for f in fields(section):
                parser.set(name, f.name, _formatValue(getattr(section, f.name)))
        return parser

    def toDict(self) -> Dict[str, Dict[str, Any]]:
        return {name: {f.name: (list(v) if isinstance(v := getattr(getattr(self, name), f.name), tuple) else v)
                       for f in fields(getattr(self, name))}
                for name in SECTIONS}

    def writeFile(self, filepath: str) -> None:
        with open(filepath, "w", encoding="utf-8") as fh:
            self.toConfigParser().write(fh)

    def withValue(self, section: str, key: str, value: Any) -> 'ExperimentConfig':
        """
        Copy with one field replaced by an already typed value.
        """
        if section not in SECTIONS:
            raise ConfigError(f"Unknown config section '{section}'.")
        current = getattr(self, section)
        if key not in {f.name for f in fields(current)}:
            raise ConfigError(f"Unknown key '{key}' in section [{section}].")
        return replace(self, **{section: replace(current, **{key: value})})

    def withOverrides(self, overrides: Iterable[str]) -> 'ExperimentConfig':
        """
        Applies 'section.key=value' overrides, values written as in the .ini file.
        """
        config = self
        for override in overrides:
            target, separator, raw = override.partition("=")
            section, dot, key = target.strip().partition(".")
            if not separator or not dot:
                raise ConfigError(f"Override '{override}' is not of the form section.key=value.")
            if section not in SECTIONS:
                raise ConfigError(f"Unknown config section '{section}'.")
            hints = get_type_hints(SECTIONS[section])
            if key not in hints:
                raise ConfigError(f"Unknown key '{key}' in section [{section}].")
            config = config.withValue(section, key, _parseValue(raw.strip(), hints[key], target))
        return config
