#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#----------------------------------------------------------------------------
# Created By: tag_distill contributors
# ---------------------------------------------------------------------------
""" Message-passing layers of the three backbone families """

import abc
from typing import Optional

import torch
import torch.nn.functional as F
from torch import nn

GCN = "gcn-style"
GAT = "attention-style"
SAGE = "sample-aggregate-style"
FAMILIES = (GCN, GAT, SAGE)


def sourceInputs(h: torch.Tensor, src: torch.Tensor, override: Optional['MessageOverride']) -> torch.Tensor:
    """
    Per-edge source features, replaced by the override values on masked edges.
    """
    inputs = h[src]
    if override is None:
        return inputs
    return torch.where(override.mask.unsqueeze(-1), override.values.to(inputs.dtype), inputs)


class MessageOverride:
    """
    Replacement source features on a subset of edges.

    Attributes:
        mask: torch.Tensor of bool, shape (edgeCount,)
            Edges whose message input is replaced.
        values: torch.Tensor of shape (edgeCount, dim)
            Replacement inputs, rows of unmasked edges are ignored.
    """
    def __init__(self, mask: torch.Tensor, values: torch.Tensor) -> None:
        if mask.dim() != 1 or values.dim() != 2 or values.shape[0] != mask.shape[0]:
            raise ValueError(f"Override mask {tuple(mask.shape)} and values {tuple(values.shape)} do not match.")
        self.mask = mask
        self.values = values


class MessagePassingLayer(nn.Module, metaclass=abc.ABCMeta):
    """
    Layer computing h'_n = UPD(h_n, AGG({MSG(h_n, h_i) : i -> n})) over a directed edge list.
    """
    def __init__(self, inDim: int, outDim: int) -> None:
        super().__init__()
        self.inDim = inDim
        self.outDim = outDim

    @abc.abstractmethod
    def forward(self, h: torch.Tensor, src: torch.Tensor, dst: torch.Tensor,
                override: Optional[MessageOverride]=None) -> torch.Tensor:
        """
        Parameters:
            h: torch.Tensor of shape (nodeCount, inDim)
            src, dst: torch.Tensor of shape (edgeCount,)
                Directed edges src -> dst.
            override: Optional[MessageOverride]
                Replacement message inputs.

        Returns:
            Tensor of shape (nodeCount, outDim).
        """
        pass


class GCNLayer(MessagePassingLayer):
    """
    Symmetric-normalized convolution with self-loops:
    h'_n = sum_{i in N(n) + n} W x_i / sqrt(d_i d_n), d = in-degree + 1.
    """
    def __init__(self, inDim: int, outDim: int) -> None:
        super().__init__(inDim, outDim)
        self.linear = nn.Linear(inDim, outDim)

    def forward(self, h, src, dst, override=None):
        nodeCount = h.shape[0]
        degree = torch.ones(nodeCount, dtype=h.dtype, device=h.device).index_add(
            0, dst, torch.ones(dst.shape[0], dtype=h.dtype, device=h.device))
        norm = (degree[src] * degree[dst]).rsqrt().unsqueeze(-1)
        messages = F.linear(sourceInputs(h, src, override), self.linear.weight) * norm
        out = F.linear(h, self.linear.weight) / degree.unsqueeze(-1)
        return out.index_add(0, dst, messages) + self.linear.bias


class SAGELayer(MessagePassingLayer):
    """
    Mean aggregation combined with the node's own state:
    h'_n = W_self h_n + W_nb mean_{i in N(n)} x_i, the mean being 0 for isolated nodes.
    """
    def __init__(self, inDim: int, outDim: int) -> None:
        super().__init__(inDim, outDim)
        self.selfLinear = nn.Linear(inDim, outDim)
        self.neighborLinear = nn.Linear(inDim, outDim, bias=False)

    def forward(self, h, src, dst, override=None):
        nodeCount = h.shape[0]
        count = torch.zeros(nodeCount, dtype=h.dtype, device=h.device).index_add(
            0, dst, torch.ones(dst.shape[0], dtype=h.dtype, device=h.device))
        summed = torch.zeros_like(h).index_add(0, dst, sourceInputs(h, src, override))
        mean = summed / count.clamp(min=1.0).unsqueeze(-1)
        return self.selfLinear(h) + self.neighborLinear(mean)


class GATLayer(MessagePassingLayer):
    """
    Single-head attention over incoming edges and the node itself:
    h'_n = sum_i a_{n,i} W x_i, a = softmax_i(LeakyReLU(u . W h_n + v . W x_i)).
    """
    def __init__(self, inDim: int, outDim: int, negativeSlope: float=0.2) -> None:
        super().__init__(inDim, outDim)
        self.linear = nn.Linear(inDim, outDim, bias=False)
        self.attentionDst = nn.Parameter(torch.empty(outDim))
        self.attentionSrc = nn.Parameter(torch.empty(outDim))
        self.bias = nn.Parameter(torch.zeros(outDim))
        self.negativeSlope = negativeSlope
        bound = 1.0 / outDim ** 0.5
        nn.init.uniform_(self.attentionDst, -bound, bound)
        nn.init.uniform_(self.attentionSrc, -bound, bound)

    def forward(self, h, src, dst, override=None):
        nodeCount = h.shape[0]
        z = self.linear(h)
        zEdges = self.linear(sourceInputs(h, src, override))
        loops = torch.arange(nodeCount, device=h.device)
        allDst = torch.cat([dst, loops])
        zSources = torch.cat([zEdges, z])
        scores = F.leaky_relu(z[allDst] @ self.attentionDst + zSources @ self.attentionSrc, self.negativeSlope)
        # per-destination max, subtracted before exp
        peak = torch.full((nodeCount,), float("-inf"), dtype=scores.dtype, device=h.device).scatter_reduce(
            0, allDst, scores.detach(), reduce="amax")
        weights = torch.exp(scores - peak[allDst])
        denominator = torch.zeros(nodeCount, dtype=scores.dtype, device=h.device).index_add(0, allDst, weights)
        alpha = (weights / denominator[allDst]).unsqueeze(-1)
        return torch.zeros_like(z).index_add(0, allDst, alpha * zSources) + self.bias


def buildLayer(family: str, inDim: int, outDim: int) -> MessagePassingLayer:
    if family == GCN:
        return GCNLayer(inDim, outDim)
    if family == GAT:
        return GATLayer(inDim, outDim)
    if family == SAGE:
        return SAGELayer(inDim, outDim)
    raise ValueError(f"Unknown backbone family '{family}', expected one of {FAMILIES}.")
