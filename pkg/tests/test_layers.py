#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#----------------------------------------------------------------------------
# Created By: tag_distill contributors
# ---------------------------------------------------------------------------
""" Message-passing layers testing module """

import pytest
import torch

from models.GraphModel import GraphStructure
from models.layers import FAMILIES, GATLayer, GCNLayer, MessageOverride, SAGELayer, buildLayer
from structures.TextGraph import TextGraph


def _structure(nodeCount, edges):
    return GraphStructure.fromGraph(TextGraph([str(i) for i in range(nodeCount)], edges, ["a"]))

def _inputs(nodeCount, dim, seed=0):
    generator = torch.Generator().manual_seed(seed)
    return torch.randn(nodeCount, dim, generator=generator, dtype=torch.float64)

def test_gcnClosedForm():
    """
    Output equals D^-1/2 (A + I) D^-1/2 X W^T + b.
    """
    torch.manual_seed(0)
    structure = _structure(4, [(0, 1), (1, 2)])
    layer = GCNLayer(3, 2).double()
    h = _inputs(4, 3)

    adjacency = torch.eye(4, dtype=torch.float64)
    adjacency[0, 1] = adjacency[1, 0] = adjacency[1, 2] = adjacency[2, 1] = 1.0
    norm = adjacency.sum(dim=1).rsqrt()
    expected = (norm[:, None] * adjacency * norm[None, :]) @ (h @ layer.linear.weight.T) + layer.linear.bias

    assert torch.allclose(layer(h, structure.src, structure.dst), expected)

def test_sageClosedForm():
    torch.manual_seed(0)
    structure = _structure(4, [(0, 1), (0, 2)])
    layer = SAGELayer(3, 2).double()
    h = _inputs(4, 3)
    out = layer(h, structure.src, structure.dst)

    mean0 = (h[1] + h[2]) / 2
    assert torch.allclose(out[0], layer.selfLinear(h[0]) + layer.neighborLinear(mean0))
    # isolated node only sees itself
    assert torch.allclose(out[3], layer.selfLinear(h[3]))

def test_gatUniformAttention():
    """
    With zero attention vectors every incoming message and the self-loop get the same weight.
    """
    torch.manual_seed(0)
    structure = _structure(3, [(0, 1), (0, 2)])
    layer = GATLayer(3, 2).double()
    with torch.no_grad():
        layer.attentionDst.zero_()
        layer.attentionSrc.zero_()
    h = _inputs(3, 3)
    z = h @ layer.linear.weight.T
    out = layer(h, structure.src, structure.dst)

    assert torch.allclose(out[0], z.mean(dim=0) + layer.bias)
    assert torch.allclose(out[1], (z[0] + z[1]) / 2 + layer.bias)

@pytest.mark.parametrize("family", FAMILIES)
def test_permutationEquivariance(family):
    torch.manual_seed(1)
    edges = [(0, 1), (1, 2), (2, 3), (3, 0), (1, 4)]
    layer = buildLayer(family, 3, 4).double()
    h = _inputs(5, 3)
    out = layer(h, *_pair(_structure(5, edges)))

    permutation = [3, 0, 4, 1, 2]
    inverse = {old: new for new, old in enumerate(permutation)}
    permuted = _structure(5, [(inverse[u], inverse[v]) for u, v in edges])
    outPermuted = layer(h[permutation], *_pair(permuted))

    assert torch.allclose(outPermuted, out[permutation])

def _pair(structure):
    return structure.src, structure.dst

@pytest.mark.parametrize("family", FAMILIES)
def test_gradcheck(family):
    torch.manual_seed(2)
    structure = _structure(4, [(0, 1), (1, 2), (2, 3)])
    layer = buildLayer(family, 3, 2).double()
    h = _inputs(4, 3).requires_grad_()

    assert torch.autograd.gradcheck(lambda x: layer(x, structure.src, structure.dst), (h,))

@pytest.mark.parametrize("family", FAMILIES)
def test_emptyOverride(family):
    torch.manual_seed(3)
    structure = _structure(3, [(0, 1), (1, 2)])
    layer = buildLayer(family, 3, 2).double()
    h = _inputs(3, 3)
    override = MessageOverride(torch.zeros(structure.edgeCount, dtype=torch.bool),
                               torch.ones(structure.edgeCount, 3, dtype=torch.float64))

    assert torch.allclose(layer(h, structure.src, structure.dst, override), layer(h, structure.src, structure.dst))

def test_overrideReplacesMessage():
    torch.manual_seed(4)
    structure = _structure(2, [(0, 1)])
    layer = SAGELayer(3, 2).double()
    h = _inputs(2, 3)
    replacement = torch.full((3,), 7.0, dtype=torch.float64)
    # edge 0 -> 1 is the first directed edge
    mask = (structure.src == 0) & (structure.dst == 1)
    values = torch.zeros(structure.edgeCount, 3, dtype=torch.float64)
    values[mask] = replacement
    out = layer(h, structure.src, structure.dst, MessageOverride(mask, values))

    assert torch.allclose(out[1], layer.selfLinear(h[1]) + layer.neighborLinear(replacement))
    assert torch.allclose(out[0], layer.selfLinear(h[0]) + layer.neighborLinear(h[1]))

def test_overrideShapes():
    with pytest.raises(ValueError):
        MessageOverride(torch.zeros(3, dtype=torch.bool), torch.zeros(2, 4))

def test_unknownFamily():
    with pytest.raises(ValueError):
        buildLayer("transformer-style", 3, 2)
