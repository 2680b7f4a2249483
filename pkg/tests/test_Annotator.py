#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#----------------------------------------------------------------------------
# Created By: tag_distill contributors
# ---------------------------------------------------------------------------
""" Annotator testing module """

import pytest

from errors import CacheMissError, ExposureViolationError
from rationale.Annotator import Annotator, auditExposure
from rationale.ResponseCache import CacheEntry, ResponseCache
from rationale.clients import CacheOnlyClient, ClientResponse, LLMClient, OracleClient
from readers.SyntheticGraphReader import SyntheticSpec, generateSynthetic
from structures.NodeRationale import FAILED, LABELS_ONLY, OK
from structures.TextGraph import SplitAssignment, TextGraph, makeInductiveView, splitNodes


class ScriptedClient(LLMClient):
    """
    Answers each prompt kind with the next scripted answer, repeating the last one.
    """
    kind = "scripted"

    def __init__(self, answers):
        super().__init__("scripted")
        self.answers = {kind: list(values) for kind, values in answers.items()}
        self.prompts = []

    def _complete(self, prompt):
        self.prompts.append(prompt)
        queue = self.answers[prompt.kind]
        text = queue.pop(0) if len(queue) > 1 else queue[0]
        return ClientResponse(text, prompt.tokenEstimate, 3, True)


GOOD = {"label": ["{Probabilities: [0.8, 0.2], Category: 'A'}"],
        "keyword": ["[alpha]"],
        "keylink": ["{Node 2: ['alpha']}"]}


def _small():
    # node 3 is a validation node, node 4 a test node
    g = TextGraph(["alpha beta", "gamma delta", "alpha gamma", "beta beta", "delta"],
                  [(0, 1), (0, 2), (1, 3), (0, 4)], ["A", "B"])
    split = SplitAssignment(trainIds=(0, 1, 2), valIds=(3,), testIds=(4,), seed=0, nodeCount=5)
    return g, split, makeInductiveView(g, split)

def _synthetic():
    spec = SyntheticSpec(classCount=2, nodesPerClass=15, intraClassEdgeProb=0.3, interClassEdgeProb=0.05, seed=3)
    g = generateSynthetic(spec)
    split = splitNodes(g, (0.6, 0.2, 0.2), 0)
    return spec, g, split, makeInductiveView(g, split)

def test_annotateNode(tmp_path):
    g, split, view = _small()
    client = ScriptedClient(GOOD)
    annotator = Annotator(client, ResponseCache(str(tmp_path)), view, split, maxRetries=1)
    rationale = annotator.annotateNode(0)

    assert rationale.status == OK
    assert rationale.pseudoLabel == 0
    assert rationale.softLabel == pytest.approx((0.8, 0.2))
    assert rationale.keywords == ("alpha",)
    assert rationale.keyNeighbors == (2,)
    assert rationale.messages == {2: ("alpha",)}
    assert client.callCount == 3
    assert annotator.ledger.promptCount == 3
    assert annotator.ledger.estimated

def test_onlyTrainTextsExposed(tmp_path):
    """
    Validation and test neighbors never reach a prompt.
    """
    g, split, view = _small()
    client = ScriptedClient(GOOD)
    cache = ResponseCache(str(tmp_path))
    annotator = Annotator(client, cache, view, split)
    annotator.annotateNodes(split.trainIds)

    assert annotator.exposed <= set(split.trainIds)
    for prompt in client.prompts:
        assert "beta beta" not in prompt.renderedText
        assert "Node 4:" not in prompt.renderedText
    assert auditExposure(cache, split) == set()

def test_nonTrainNodeRefused(tmp_path):
    g, split, view = _small()
    annotator = Annotator(ScriptedClient(GOOD), ResponseCache(str(tmp_path)), view, split)

    with pytest.raises(ExposureViolationError):
        annotator.annotateNode(3)
    with pytest.raises(ValueError):
        annotator.annotateNode(7)

def test_auditFindsForeignNodes(tmp_path):
    _, split, _ = _small()
    cache = ResponseCache(str(tmp_path))
    cache.put(CacheEntry(requestHash="x", kind="label", node=0, model="m", templateVersion="v1",
                         rawResponse="", exposedNodes=(0, 4)))

    assert auditExposure(cache, split) == {4}

def test_labelFailure(tmp_path):
    g, split, view = _small()
    client = ScriptedClient({"label": ["no idea"], "keyword": ["[alpha]"], "keylink": ["{}"]})
    rationale = Annotator(client, ResponseCache(str(tmp_path)), view, split, maxRetries=2).annotateNode(0)

    assert rationale.status == FAILED
    assert rationale.pseudoLabel == -1
    assert not rationale.usable
    assert rationale.softLabel == (0.5, 0.5)
    assert client.callCount == 3

def test_keywordFailureKeepsLabel(tmp_path):
    g, split, view = _small()
    client = ScriptedClient({"label": GOOD["label"], "keyword": ["nothing"], "keylink": ["{}"]})
    rationale = Annotator(client, ResponseCache(str(tmp_path)), view, split, maxRetries=0).annotateNode(0)

    assert rationale.status == LABELS_ONLY
    assert rationale.usable
    assert rationale.keywords == ()
    assert rationale.keyNeighbors == ()

def test_repairedRetry(tmp_path):
    g, split, view = _small()
    client = ScriptedClient({"label": ["garbled", GOOD["label"][0]], "keyword": ["[alpha]"], "keylink": ["{}"]})
    rationale = Annotator(client, ResponseCache(str(tmp_path)), view, split, maxRetries=1).annotateNode(0)

    assert rationale.status == OK
    assert rationale.keyNeighbors == ()
    assert "retry 1" in client.prompts[1].renderedText

def test_isolatedNodeSkipsKeyLinks(tmp_path):
    g = TextGraph(["alpha", "beta"], [], ["A", "B"])
    split = SplitAssignment(trainIds=(0, 1), valIds=(), testIds=(), seed=0, nodeCount=2)
    client = ScriptedClient(GOOD)
    rationale = Annotator(client, ResponseCache(str(tmp_path)), g, split).annotateNode(0)

    assert rationale.status == OK
    assert rationale.keyNeighbors == ()
    assert client.callCount == 2

def test_replayFromCache(tmp_path):
    """
    A warm cache reproduces every rationale without a single client call.
    """
    spec, g, split, view = _synthetic()
    cache = ResponseCache(str(tmp_path))
    first = Annotator(OracleClient(view, spec), cache, view, split, workers=4).annotateNodes(split.trainIds)

    replayClient = CacheOnlyClient("oracle")
    replay = Annotator(replayClient, ResponseCache(str(tmp_path)), view, split).annotateNodes(split.trainIds)

    assert replay == first
    assert replayClient.callCount == 0
    assert all(r.status == OK for r in first.values())

def test_coldCacheOnly(tmp_path):
    spec, g, split, view = _synthetic()
    annotator = Annotator(CacheOnlyClient("oracle"), ResponseCache(str(tmp_path)), view, split)

    with pytest.raises(CacheMissError):
        annotator.annotateNodes(split.trainIds)
