#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#----------------------------------------------------------------------------
# Created By: tag_distill contributors
# ---------------------------------------------------------------------------
""" Synthetic graph generator testing module """

import numpy as np
import pytest

from errors import ConfigError
from readers.SyntheticGraphReader import SyntheticGraphReader, SyntheticSpec, generateSynthetic, writeSyntheticSpec


def test_generate():
    spec = SyntheticSpec(classCount=3, nodesPerClass=20, wordsPerText=10, seed=4)
    g = generateSynthetic(spec)

    assert g.nodeCount == 60
    assert g.classNames == ("Topic 0", "Topic 1", "Topic 2")
    assert np.bincount(g.goldLabels).tolist() == [20, 20, 20]
    assert all(len(text.split()) == 10 for text in g.texts)

def test_deterministic():
    spec = SyntheticSpec(nodesPerClass=15, seed=2)
    a, b = generateSynthetic(spec), generateSynthetic(spec)

    assert a.texts == b.texts
    assert a.edges.tolist() == b.edges.tolist()

def test_noiseFree():
    """
    Without distractors every word of a text is a signature word of its class.
    """
    spec = SyntheticSpec(classCount=2, nodesPerClass=10, noiseWordRate=0.0)
    g = generateSynthetic(spec)
    owners = spec.wordClasses()
    for text, label in zip(g.texts, g.goldLabels):
        assert {owners[word] for word in text.split()} == {int(label)}

def test_homophily():
    spec = SyntheticSpec(classCount=2, nodesPerClass=30, intraClassEdgeProb=0.5, interClassEdgeProb=0.0)
    g = generateSynthetic(spec)

    assert g.edgeCount > 0
    assert (g.goldLabels[g.edges[:, 0]] == g.goldLabels[g.edges[:, 1]]).all()

def test_invalidSpec():
    with pytest.raises(ConfigError):
        SyntheticSpec(noiseWordRate=1.5)
    with pytest.raises(ConfigError):
        SyntheticSpec(classCount=2, signatureVocab=(("alpha",), ("Alpha",)))
    with pytest.raises(ConfigError):
        SyntheticSpec(classCount=0)

def test_specFile(tmp_path):
    path = str(tmp_path / "small.synthetic")
    spec = SyntheticSpec(classCount=2, nodesPerClass=5, seed=9)
    writeSyntheticSpec(spec, path)
    reader = SyntheticGraphReader(path)

    assert reader.readSpec() == spec
    assert reader.read().texts == generateSynthetic(spec).texts

    with pytest.raises(ValueError):
        SyntheticGraphReader(str(tmp_path / "missing.synthetic")).read()
