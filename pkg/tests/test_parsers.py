#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#----------------------------------------------------------------------------
# Created By: tag_distill contributors
# ---------------------------------------------------------------------------
""" LLM answer parsers testing module """

import numpy as np
import pytest

from errors import ParseError
from rationale.parsers import matchCategory, parseKeylinkResponse, parseKeywordResponse, parseLabelResponse

CLASSES = ["Theory", "Neural_Networks", "Rule_Learning"]


def test_parseLabel():
    label, soft = parseLabelResponse("{Probabilities: [0.1, 0.7, 0.2], Category: 'Neural_Networks'}", CLASSES)

    assert label == 1
    assert soft == pytest.approx((0.1, 0.7, 0.2))

def test_parseLabelRenormalizes():
    label, soft = parseLabelResponse("Probabilities: [2, -1, 2]\nCategory: Theory", CLASSES)

    assert label == 0
    assert soft == pytest.approx((0.5, 0.0, 0.5))
    assert sum(soft) == pytest.approx(1.0)

def test_parseLabelCategoryWins():
    """
    The category is the final answer even when another class is more probable.
    """
    label, soft = parseLabelResponse("{Probabilities: [0.6, 0.3, 0.1], Category: 'Rule_Learning'}", CLASSES)

    assert label == 2
    assert soft == pytest.approx((0.6, 0.3, 0.1))

def test_parseLabelAllZero():
    label, soft = parseLabelResponse("{Probabilities: [0, 0, 0], Category: 'Theory'}", CLASSES)

    assert label == 0
    assert soft == (1.0, 0.0, 0.0)

def test_parseLabelErrors():
    with pytest.raises(ParseError):
        parseLabelResponse("I think it is about Theory.", CLASSES)
    with pytest.raises(ParseError):
        parseLabelResponse("{Probabilities: [0.5, 0.5], Category: 'Theory'}", CLASSES)
    with pytest.raises(ParseError):
        parseLabelResponse("{Probabilities: [0.5, x, 0.5], Category: 'Theory'}", CLASSES)
    with pytest.raises(ParseError):
        parseLabelResponse("{Probabilities: [0.5, nan, 0.5], Category: 'Theory'}", CLASSES)
    with pytest.raises(ParseError):
        parseLabelResponse("{Probabilities: [0.2, 0.3, 0.5]}", CLASSES)
    with pytest.raises(ParseError):
        parseLabelResponse("{Probabilities: [0.2, 0.3, 0.5], Category: 'Biology'}", CLASSES)

def test_matchCategory():
    assert matchCategory("neural_networks", CLASSES) == 1
    assert matchCategory("'Rule_Learning'", CLASSES) == 2
    assert matchCategory("networks", ["Theory", "Neural Network"]) == 1
    with pytest.raises(ParseError):
        matchCategory("Biology", CLASSES)

def test_parseKeywords():
    text = "Backpropagation trains deep neural networks with gradients"
    keywords = parseKeywordResponse("[backpropagation, 'neural networks', quantum, Gradients, gradients]", text, cap=5)

    assert keywords == ["backpropagation", "neural networks", "Gradients"]
    assert parseKeywordResponse("[]", text) == []
    assert parseKeywordResponse("[deep, neural, trains]", text, cap=2) == ["deep", "neural"]
    with pytest.raises(ParseError):
        parseKeywordResponse("deep, neural", text)

def test_parseKeyLinks():
    raw = "{Node 3: ['alpha', 'beta', 'alpha'], Node 8: ['gamma'], Node 3: ['ignored'], Node 5: ['delta']}"
    keyNeighbors, messages = parseKeylinkResponse(raw, [3, 5, 6], cap=5)

    assert keyNeighbors == (3, 5)
    assert messages == {3: ("alpha", "beta"), 5: ("delta",)}

def test_parseKeyLinksEmptyAndCapped():
    assert parseKeylinkResponse("{}", [1, 2]) == ((), {})
    keyNeighbors, messages = parseKeylinkResponse("{'Node 1': [a, b, c]}", [1], cap=2)
    assert keyNeighbors == (1,)
    assert messages[1] == ("a", "b")
    with pytest.raises(ParseError):
        parseKeylinkResponse("no mapping here", [1])
    with pytest.raises(ParseError):
        parseKeylinkResponse("{something else}", [1])

def test_fuzzedAnswers():
    """
    Arbitrary answers either parse or raise ParseError.
    """
    rng = np.random.default_rng(0)
    alphabet = list("{}[]:,'\" 0123456789.-abcxyz\n") + ["Node ", "Probabilities", "Category", "Theory", "nan", "inf"]
    text = "abc xyz theory"
    for _ in range(500):
        raw = "".join(rng.choice(alphabet, size=int(rng.integers(0, 40))))
        for parse in (lambda r: parseLabelResponse(r, CLASSES),
                      lambda r: parseKeywordResponse(r, text),
                      lambda r: parseKeylinkResponse(r, [1, 2, 3])):
            try:
                parse(raw)
            except ParseError:
                pass
