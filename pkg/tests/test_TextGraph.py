#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#----------------------------------------------------------------------------
# Created By: tag_distill contributors
# ---------------------------------------------------------------------------
""" TextGraph, splits and inductive view testing module """

import numpy as np
import pytest

from errors import ConfigError, ReferentialError
from structures.TextGraph import TEST, TRAIN, VAL, TextGraph, makeInductiveView, splitNodes


def _graph(nodeCount, edges=()):
    return TextGraph([f"text {i}" for i in range(nodeCount)], edges, ["a", "b"])

def test_edgesNormalized():
    """
    Edges are symmetrized, duplicates collapsed and self-loops dropped.
    """
    g = _graph(4, [(1, 0), (0, 1), (2, 2), (3, 1), (1, 3)])

    assert g.edgeCount == 2
    assert g.edges.tolist() == [[0, 1], [1, 3]]
    assert g.neighbors(1).tolist() == [0, 3]
    assert g.degree(2) == 0
    assert g.hasEdge(3, 1) and g.hasEdge(1, 3)
    assert not g.hasEdge(0, 3)
    assert g.directedEdges().shape == (2, 4)

def test_unknownNode():
    with pytest.raises(ReferentialError):
        _graph(3, [(0, 3)])

def test_goldLabelRange():
    with pytest.raises(ValueError):
        TextGraph(["x", "y"], [], ["a", "b"], [0, 2])
    g = TextGraph(["x", "y"], [], ["a", "b"], [1, -1])
    assert g.goldLabels.tolist() == [1, -1]

def test_splitSizes():
    """
    Sizes are rounded half up and the test set takes the remainder.
    """
    split = splitNodes(_graph(10), (0.6, 0.2, 0.2), 0)
    assert (len(split.trainIds), len(split.valIds), len(split.testIds)) == (6, 2, 2)

    split = splitNodes(_graph(2708), (0.6, 0.2, 0.2), 0)
    assert (len(split.trainIds), len(split.valIds), len(split.testIds)) == (1625, 542, 541)

def test_splitDisjointAndCovering():
    split = splitNodes(_graph(101), (0.5, 0.25, 0.25), 3)
    train, val, test = set(split.trainIds), set(split.valIds), set(split.testIds)

    assert not train & val and not train & test and not val & test
    assert train | val | test == set(range(101))
    tags = split.tags()
    assert tags[split.trainIds[0]] == TRAIN
    assert tags[split.valIds[0]] == VAL
    assert tags[split.testIds[0]] == TEST
    assert split.mask(TRAIN).sum() == len(train)

def test_splitDeterministic():
    a = splitNodes(_graph(50), (0.6, 0.2, 0.2), 7)
    b = splitNodes(_graph(50), (0.6, 0.2, 0.2), 7)
    c = splitNodes(_graph(50), (0.6, 0.2, 0.2), 8)

    assert a == b
    assert a.trainIds != c.trainIds

def test_splitRatios():
    with pytest.raises(ConfigError):
        splitNodes(_graph(10), (0.6, 0.2, 0.3), 0)
    with pytest.raises(ConfigError):
        splitNodes(_graph(10), (0.6, 0.4), 0)
    with pytest.raises(ConfigError):
        splitNodes(_graph(10), (1.2, -0.2, 0.0), 0)

def test_inductiveView():
    """
    No edge of the view touches a test node and the full graph is untouched.
    """
    rng = np.random.default_rng(0)
    edges = [(int(u), int(v)) for u, v in rng.integers(0, 60, size=(200, 2))]
    g = _graph(60, edges)
    split = splitNodes(g, (0.6, 0.2, 0.2), 1)
    view = makeInductiveView(g, split)
    isTest = split.mask(TEST)

    assert view.nodeCount == g.nodeCount
    assert view.texts == g.texts
    assert not (isTest[view.edges[:, 0]] | isTest[view.edges[:, 1]]).any()
    for node in split.testIds:
        assert view.degree(node) == 0
    kept = {tuple(e) for e in view.edges.tolist()}
    expected = {tuple(e) for e in g.edges.tolist() if not isTest[e[0]] and not isTest[e[1]]}
    assert kept == expected
    assert g.edgeCount == len({(min(u, v), max(u, v)) for u, v in edges if u != v})

def test_inductiveViewSizeMismatch():
    split = splitNodes(_graph(10), (0.6, 0.2, 0.2), 0)
    with pytest.raises(ValueError):
        makeInductiveView(_graph(11), split)

def test_neighborTexts():
    """
    Neighbors come by descending degree then ascending index, capped.
    """
    # node 0 neighbors: 1 (degree 3), 2 (degree 1), 3 (degree 2), 4 (degree 2)
    g = _graph(7, [(0, 1), (0, 2), (0, 3), (0, 4), (1, 5), (1, 6), (3, 5), (4, 6)])

    full = g.neighborTexts(0, 10)
    assert [n for n, _ in full] == [1, 3, 4, 2]
    assert full[0] == (1, "text 1")
    assert not full.truncated

    capped = g.neighborTexts(0, 2)
    assert [n for n, _ in capped] == [1, 3]
    assert capped.truncated

def test_neighborTextsAllowed():
    g = _graph(4, [(0, 1), (0, 2), (0, 3)])
    allowed = np.array([True, False, True, True])

    assert [n for n, _ in g.neighborTexts(0, 5, allowed)] == [2, 3]
    with pytest.raises(ValueError):
        g.neighborTexts(9, 5)
