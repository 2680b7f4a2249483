#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#----------------------------------------------------------------------------
# Created By: tag_distill contributors
# ---------------------------------------------------------------------------
""" Synthetic text-attributed graph generator used by the offline oracle """

import json
import logging
import os
from dataclasses import asdict, dataclass
from typing import Dict, Tuple

import numpy as np

from errors import ConfigError
from structures.TextGraph import TextGraph

from .Reader import Reader


@dataclass(frozen=True)
class SyntheticSpec:
    """
    Parameters of a planted-partition graph whose node texts mix class signature
    words with distractors.

    Attributes:
        classCount: int
            Number of classes.
        nodesPerClass: int
            Nodes generated per class.
        intraClassEdgeProb: float
            Probability of an edge between two nodes of the same class.
        interClassEdgeProb: float
            Probability of an edge between nodes of different classes.
        noiseWordRate: float
            Expected fraction of distractor words in a text.
        seed: int
            Generator seed.
        signatureVocab: Tuple[Tuple[str, ...], ...]
            Per-class signature words, pairwise disjoint. Generated as c<k>w<j> when empty.
        signatureVocabSize: int
            Words per class when signatureVocab is generated.
        wordsPerText: int
            Words in every node text.
        neutralVocabSize: int
            Size of the vocabulary of class-neutral distractors.
        confusionRate: float
            Share of distractors drawn from other classes' signature words.
        classNames: Tuple[str, ...]
            Category names, 'Topic <k>' when empty.
    """
    classCount: int = 3
    nodesPerClass: int = 200
    intraClassEdgeProb: float = 0.05
    interClassEdgeProb: float = 0.005
    noiseWordRate: float = 0.3
    seed: int = 1
    signatureVocab: Tuple[Tuple[str, ...], ...] = ()
    signatureVocabSize: int = 8
    wordsPerText: int = 12
    neutralVocabSize: int = 30
    confusionRate: float = 0.5
    classNames: Tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.classCount < 1 or self.nodesPerClass < 1 or self.wordsPerText < 1:
            raise ConfigError("classCount, nodesPerClass and wordsPerText must be positive.")
        for name in ("intraClassEdgeProb", "interClassEdgeProb", "noiseWordRate", "confusionRate"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigError(f"{name} must be in [0, 1], was {value}.")
        if not self.signatureVocab:
            vocab = tuple(tuple(f"c{k}w{j}" for j in range(self.signatureVocabSize)) for k in range(self.classCount))
            object.__setattr__(self, "signatureVocab", vocab)
        else:
            object.__setattr__(self, "signatureVocab", tuple(tuple(words) for words in self.signatureVocab))
        if not self.classNames:
            object.__setattr__(self, "classNames", tuple(f"Topic {k}" for k in range(self.classCount)))
        else:
            object.__setattr__(self, "classNames", tuple(self.classNames))
        if len(self.signatureVocab) != self.classCount or len(self.classNames) != self.classCount:
            raise ConfigError(f"Expected {self.classCount} signature vocabularies and class names.")
        seen: set = set()
        for words in self.signatureVocab:
            if not words:
                raise ConfigError("Every class needs at least one signature word.")
            lowered = {w.lower() for w in words}
            if seen & lowered:
                raise ConfigError(f"Signature vocabularies overlap on {sorted(seen & lowered)}.")
            seen |= lowered

    def neutralVocab(self) -> Tuple[str, ...]:
        return tuple(f"noise{j}" for j in range(self.neutralVocabSize))

    def wordClasses(self) -> Dict[str, int]:
        """
        Lower-cased signature word to owning class index.
        """
        return {word.lower(): k for k, words in enumerate(self.signatureVocab) for word in words}

    @property
    def nodeCount(self) -> int:
        return self.classCount * self.nodesPerClass


def generateSynthetic(spec: SyntheticSpec) -> TextGraph:
    """
    Samples a synthetic text-attributed graph.

    Every text holds wordsPerText words: each word is a distractor with probability
    noiseWordRate (another class' signature word with probability confusionRate,
    otherwise a neutral word) and a signature word of the node's class otherwise.
    Edges are sampled independently with the intra/inter class probabilities.

    Parameters:
        spec: SyntheticSpec
            Generator parameters.

    Returns:
        TextGraph with gold labels set.
    """
    rng = np.random.default_rng(spec.seed)
    labels = np.repeat(np.arange(spec.classCount), spec.nodesPerClass)
    neutral = spec.neutralVocab()

    texts = []
    for label in labels:
        words = []
        for _ in range(spec.wordsPerText):
            if rng.random() < spec.noiseWordRate:
                if spec.classCount > 1 and (not neutral or rng.random() < spec.confusionRate):
                    other = rng.choice([k for k in range(spec.classCount) if k != label])
                    vocab = spec.signatureVocab[other]
                else:
                    vocab = neutral
            else:
                vocab = spec.signatureVocab[label]
            words.append(vocab[rng.integers(len(vocab))])
        texts.append(" ".join(words[i] for i in rng.permutation(len(words))))

    rows, cols = np.triu_indices(spec.nodeCount, k=1)
    probabilities = np.where(labels[rows] == labels[cols], spec.intraClassEdgeProb, spec.interClassEdgeProb)
    keep = rng.random(rows.size) < probabilities
    edges = np.stack([rows[keep], cols[keep]], axis=1)

    graph = TextGraph(texts, edges, spec.classNames, labels)
    logging.info(f"Generated synthetic graph with {graph.nodeCount} nodes and {graph.edgeCount} edges.")
    return graph


class SyntheticGraphReader(Reader):
    """
    Concrete implementation of abstract Reader class that generates a graph from
    a JSON file holding SyntheticSpec fields.
    """

    def __init__(self, filePath: str) -> None:
        super().__init__(filePath)

        logging.debug(f"SyntheticGraphReader created for {filePath}")

    def readSpec(self) -> SyntheticSpec:
        if not os.path.exists(self.filepath):
            raise ValueError(f"Synthetic spec file {self.filepath} does not exist.")
        with open(self.filepath, "r", encoding="utf-8") as fh:
            fields = json.load(fh)
        return SyntheticSpec(**fields)

    def read(self) -> TextGraph:
        return generateSynthetic(self.readSpec())


def writeSyntheticSpec(spec: SyntheticSpec, filepath: str) -> None:
    with open(filepath, "w", encoding="utf-8") as fh:
        json.dump(asdict(spec), fh, indent=2)
