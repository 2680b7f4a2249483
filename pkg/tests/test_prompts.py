#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#----------------------------------------------------------------------------
# Created By: tag_distill contributors
# ---------------------------------------------------------------------------
""" Prompt construction testing module """

import pytest

from rationale.prompts import (KEYLINK, KEYWORD, LABEL, TEMPLATE_VERSION, buildKeylinkPrompt, buildKeywordPrompt,
                               buildLabelPrompt)
from utils import estimateTokens

CLASSES = ["Theory", "Neural_Networks", "Rule_Learning"]


def test_labelPrompt():
    prompt = buildLabelPrompt(4, "a paper on backpropagation", [(7, "deep nets"), (2, "rule induction")], CLASSES)

    assert prompt.kind == LABEL
    assert prompt.node == 4
    assert prompt.templateVersion == TEMPLATE_VERSION
    assert prompt.exposedNodes == (4, 7, 2)
    assert "[Theory, Neural_Networks, Rule_Learning]" in prompt.renderedText
    assert "The paper is: a paper on backpropagation" in prompt.renderedText
    assert "Node 7: deep nets\nNode 2: rule induction" in prompt.renderedText
    assert "exactly 3 probabilities" in prompt.renderedText
    assert prompt.tokenEstimate == estimateTokens(prompt.renderedText)

def test_labelPromptWithoutNeighbors():
    prompt = buildLabelPrompt(0, "isolated", [], CLASSES, subject="product")

    assert "neighbors" not in prompt.renderedText
    assert "The product is: isolated" in prompt.renderedText
    assert prompt.exposedNodes == (0,)
    with pytest.raises(ValueError):
        buildLabelPrompt(0, "text", [], [])

def test_keywordPrompt():
    prompt = buildKeywordPrompt(3, "some text", 1, CLASSES, keywordCap=4)

    assert prompt.kind == KEYWORD
    assert prompt.exposedNodes == (3,)
    assert "at most 4 words" in prompt.renderedText
    assert "'Neural_Networks'" in prompt.renderedText
    assert "at most 1 word " in buildKeywordPrompt(3, "some text", 1, CLASSES, keywordCap=1).renderedText

def test_keylinkPrompt():
    prompt = buildKeylinkPrompt(5, "center", [(1, "left"), (9, "right")], 2, CLASSES, messageCap=3,
                                network="co-purchase network")

    assert prompt.kind == KEYLINK
    assert prompt.exposedNodes == (5, 1, 9)
    assert "co-purchase network" in prompt.renderedText
    assert "at most 3 keywords" in prompt.renderedText
    assert "'Rule_Learning'" in prompt.renderedText
    assert buildKeylinkPrompt(5, "center", [], 2, CLASSES) is None

def test_templateVersionChangesNothingButTheRecord():
    a = buildKeywordPrompt(3, "some text", 0, CLASSES)
    b = buildKeywordPrompt(3, "some text", 0, CLASSES, templateVersion="v2")

    assert a.renderedText == b.renderedText
    assert a.templateVersion != b.templateVersion

def test_withRepair():
    prompt = buildKeywordPrompt(3, "some text", 0, CLASSES)
    repaired = prompt.withRepair(1)

    assert repaired.renderedText.startswith(prompt.renderedText)
    assert "retry 1" in repaired.renderedText
    assert repaired.tokenEstimate > prompt.tokenEstimate
    assert repaired.exposedNodes == prompt.exposedNodes
    assert prompt.withRepair(2).renderedText != repaired.renderedText
