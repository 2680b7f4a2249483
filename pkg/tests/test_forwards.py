#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#----------------------------------------------------------------------------
# Created By: tag_distill contributors
# ---------------------------------------------------------------------------
""" Student and interpreter forward passes testing module """

import numpy as np
import pytest
import torch

from encoders.HashingEncoder import HashingEncoder
from models.GraphModel import BackboneConfig, ForwardTrace, GraphModel, GraphStructure
from models.forwards import (EnhancementFlags, buildInterpreterPlan, buildStudentStructure, encodeInterpreterInputs,
                             forwardInterpreter, forwardStudent, predict)
from structures.NodeRationale import FAILED, NodeRationale
from structures.TextGraph import TextGraph

NO_ENHANCEMENT = EnhancementFlags(useKeywords=False, useKeyEdges=False, useMessages=False)


def _graph():
    texts = ["alpha beta gamma", "beta delta", "gamma epsilon", "delta zeta", "alpha"]
    return TextGraph(texts, [(0, 1), (0, 2), (1, 3), (2, 3), (0, 4)], ["x", "y"])

def _rationales():
    return {
        0: NodeRationale(0, 1, (0.2, 0.8), keywords=("alpha",), keyNeighbors=(1, 4), messages={1: ("beta",)}),
        3: NodeRationale(3, 0, (0.9, 0.1), keywords=("delta",)),
    }

def _model(family="gcn-style"):
    torch.manual_seed(0)
    return GraphModel(BackboneConfig(family=family, layers=2, hiddenDim=6, classCount=2, inputDim=32), torch.float64)

@pytest.mark.parametrize("family", ["gcn-style", "attention-style", "sample-aggregate-style"])
def test_identityEquivalence(family):
    """
    Without any enhancement the interpreter pass is the student pass.
    """
    g, encoder, model = _graph(), HashingEncoder(dim=32), _model(family)
    student = forwardStudent(model, g, encoder).logits

    plain = forwardInterpreter(model, buildInterpreterPlan(g, _rationales(), NO_ENHANCEMENT), encoder).logits
    assert torch.allclose(plain, student, atol=1e-6)

    withoutRationales = forwardInterpreter(model, buildInterpreterPlan(g, {}), encoder).logits
    assert torch.allclose(withoutRationales, student, atol=1e-6)

def test_keyEdgePruning():
    g = _graph()
    plan = buildInterpreterPlan(g, _rationales(), EnhancementFlags(useKeywords=False, useMessages=False))

    assert plan.structure.incoming(0) == [1, 4]
    assert plan.structure.incoming(3) == [1, 2]
    assert plan.structure.incoming(1) == [0, 3]
    assert plan.messageEdges == ()

def test_keyMessages():
    g = _graph()
    plan = buildInterpreterPlan(g, _rationales())

    assert len(plan.messageEdges) == 2
    assert plan.messageWords == (("beta",), ())
    assert plan.messageFallbacks == (g.texts[1], g.texts[4])
    edges = [(int(plan.structure.src[e]), int(plan.structure.dst[e])) for e in plan.messageEdges]
    assert edges == [(1, 0), (4, 0)]

    encoder = HashingEncoder(dim=32)
    h0, override = encodeInterpreterInputs(plan, encoder)
    assert torch.equal(h0[0], encoder.encodeKeywords(["alpha"]))
    assert torch.equal(h0[1], encoder.encodeText(g.texts[1]))
    assert int(override.mask.sum()) == 2
    assert torch.equal(override.values[plan.messageEdges[0]], encoder.encodeKeywords(["beta"]))
    assert torch.equal(override.values[plan.messageEdges[1]], encoder.encodeText(g.texts[4]))

def test_unusableRationaleIgnored():
    g = _graph()
    rationales = {0: NodeRationale(0, -1, (0.5, 0.5), keywords=("alpha",), keyNeighbors=(1,), status=FAILED)}
    plan = buildInterpreterPlan(g, rationales)

    assert plan.structure.incoming(0) == [1, 2, 4]
    assert plan.keywordLists[0] == ()

def test_foreignKeyNeighborDropped():
    g = _graph()
    plan = buildInterpreterPlan(g, {3: NodeRationale(3, 0, (1.0, 0.0), keyNeighbors=(0,))})

    assert plan.structure.incoming(3) == [1, 2]

def test_studentStructure():
    g = _graph()
    structure = buildStudentStructure(g)

    assert structure.edgeCount == 2 * g.edgeCount
    assert structure.incoming(0) == [1, 2, 4]

def test_predictTies():
    structure = GraphStructure(torch.zeros(0, dtype=torch.int64), torch.zeros(0, dtype=torch.int64), 2)
    trace = ForwardTrace([torch.zeros(2, 1)], torch.tensor([[0.0, 0.0], [0.0, 2.0]]), structure)
    labels, probabilities = predict(trace)

    assert labels.tolist() == [0, 1]
    assert np.allclose(probabilities[0], [0.5, 0.5])
    assert np.allclose(probabilities.sum(axis=1), 1.0)
