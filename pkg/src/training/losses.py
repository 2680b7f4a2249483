#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#----------------------------------------------------------------------------
# Created By: tag_distill contributors
# ---------------------------------------------------------------------------
""" Interpreter and student objectives """

from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping

import torch
import torch.nn.functional as F

from models.GraphModel import ForwardTrace
from structures.NodeRationale import NodeRationale

from .AlignmentWeightTable import AlignmentWeightTable


@dataclass
class InterpreterLossTerms:
    """
    Attributes:
        labelLoss: torch.Tensor
            Cross-entropy against pseudo-labels.
        logitsLoss: torch.Tensor
            Mean squared error of predicted probabilities against soft labels.
        total: torch.Tensor
            labelLoss + lambda1 * logitsLoss.
        lambda1: float
    """
    labelLoss: torch.Tensor
    logitsLoss: torch.Tensor
    total: torch.Tensor
    lambda1: float

    def toRecord(self) -> Dict[str, float]:
        return {"labelLoss": float(self.labelLoss), "logitsLoss": float(self.logitsLoss), "total": float(self.total)}


@dataclass
class StudentLossTerms:
    """
    Attributes:
        labelLoss: torch.Tensor
            Cross-entropy against pseudo-labels.
        logitsLoss: torch.Tensor
            Mean squared error between student and interpreter probabilities.
        semanticLoss: torch.Tensor
            Weighted distance between layer-0 embeddings.
        structuralLoss: torch.Tensor
            Weighted distance between final-layer embeddings.
        total: torch.Tensor
            labelLoss + lambda2 * logitsLoss + lambda3 * semanticLoss + lambda4 * structuralLoss.
        lambda2, lambda3, lambda4: float
    """
    labelLoss: torch.Tensor
    logitsLoss: torch.Tensor
    semanticLoss: torch.Tensor
    structuralLoss: torch.Tensor
    total: torch.Tensor
    lambda2: float
    lambda3: float
    lambda4: float

    def toRecord(self) -> Dict[str, float]:
        return {"labelLoss": float(self.labelLoss), "logitsLoss": float(self.logitsLoss),
                "semanticLoss": float(self.semanticLoss), "structuralLoss": float(self.structuralLoss),
                "total": float(self.total)}


def supervisedIds(rationales: Mapping[int, NodeRationale], trainIds: Iterable[int]) -> List[int]:
    """
    Sorted train ids whose rationale carries a pseudo-label.
    """
    return sorted(int(n) for n in trainIds if int(n) in rationales and rationales[int(n)].usable)


def _targets(rationales: Mapping[int, NodeRationale], ids: List[int], dtype: torch.dtype):
    labels = torch.tensor([rationales[n].pseudoLabel for n in ids], dtype=torch.int64)
    soft = torch.tensor([rationales[n].softLabel for n in ids], dtype=dtype)
    return labels, soft


def interpreterLoss(trace: ForwardTrace, rationales: Mapping[int, NodeRationale], trainIds: Iterable[int],
                    lambda1: float=1.0) -> InterpreterLossTerms:
    """
    Cross-entropy on pseudo-labels plus lambda1 times the probability-space
    MSE against soft labels, both averaged over the train ids with a usable rationale.

    Parameters:
        trace: ForwardTrace
            Interpreter pass.
        rationales: Mapping[int, NodeRationale]
        trainIds: Iterable[int]
        lambda1: float, default=1.0

    Returns:
        InterpreterLossTerms
    """
    if lambda1 < 0:
        raise ValueError(f"lambda1 must be non-negative, was {lambda1}")
    ids = supervisedIds(rationales, trainIds)
    if not ids:
        raise ValueError("Interpreter loss needs at least one train node with a pseudo-label.")
    logits = trace.logits[ids]
    labels, soft = _targets(rationales, ids, logits.dtype)
    labelLoss = F.cross_entropy(logits, labels)
    logitsLoss = F.mse_loss(torch.softmax(logits, dim=-1), soft)
    return InterpreterLossTerms(labelLoss, logitsLoss, labelLoss + lambda1 * logitsLoss, lambda1)


def widthNormalizedDistance(a: torch.Tensor, b: torch.Tensor) -> torch.Tensor:
    """
    Row-wise squared Euclidean distance divided by the embedding width.
    """
    if a.shape != b.shape:
        raise ValueError(f"Cannot align embeddings of shapes {tuple(a.shape)} and {tuple(b.shape)}.")
    return ((a - b) ** 2).sum(dim=-1) / a.shape[-1]


def _weightedAlignment(weights: torch.Tensor, student: torch.Tensor, interpreter: torch.Tensor) -> torch.Tensor:
    if weights.numel() == 0:
        return student.sum() * 0.0
    return (weights.to(student.dtype) * widthNormalizedDistance(student, interpreter.to(student.dtype))).mean()


def semanticAlignmentLoss(weights: AlignmentWeightTable, studentTrace: ForwardTrace, interpreterTrace: ForwardTrace,
                          trainIds: Iterable[int]) -> torch.Tensor:
    """
    Mean over trainIds of semanticWeight(n) * d(student h_{n,0}, interpreter h_{n,0}).

    Parameters:
        weights: AlignmentWeightTable
        studentTrace: ForwardTrace
        interpreterTrace: ForwardTrace
        trainIds: Iterable[int]
            Nodes listed in the weight table.

    Returns:
        Scalar tensor.
    """
    ids = sorted(int(n) for n in trainIds)
    return _weightedAlignment(weights.semanticTensor(ids), studentTrace.layers[0][ids], interpreterTrace.layers[0][ids])


def structuralAlignmentLoss(weights: AlignmentWeightTable, studentTrace: ForwardTrace, interpreterTrace: ForwardTrace,
                            trainIds: Iterable[int]) -> torch.Tensor:
    """
    Mean over trainIds of structuralWeight(n) * d(student h_{n,l}, interpreter h_{n,l}).
    """
    ids = sorted(int(n) for n in trainIds)
    return _weightedAlignment(weights.structuralTensor(ids), studentTrace.final[ids], interpreterTrace.final[ids])


def studentLoss(studentTrace: ForwardTrace, interpreterTrace: ForwardTrace, rationales: Mapping[int, NodeRationale],
                weights: AlignmentWeightTable, trainIds: Iterable[int], lambda2: float=1.0, lambda3: float=1.0,
                lambda4: float=1.0) -> StudentLossTerms:
    """
    Student objective: cross-entropy on pseudo-labels, MSE against the frozen
    interpreter's probabilities and the two weighted alignment terms.

    The interpreter trace is detached, no gradient reaches the interpreter.

    Parameters:
        studentTrace: ForwardTrace
        interpreterTrace: ForwardTrace
        rationales: Mapping[int, NodeRationale]
        weights: AlignmentWeightTable
        trainIds: Iterable[int]
        lambda2, lambda3, lambda4: float, default=1.0

    Returns:
        StudentLossTerms
    """
    if min(lambda2, lambda3, lambda4) < 0:
        raise ValueError(f"Loss weights must be non-negative, got {(lambda2, lambda3, lambda4)}")
    ids = supervisedIds(rationales, trainIds)
    if not ids:
        raise ValueError("Student loss needs at least one train node with a pseudo-label.")
    interpreter = ForwardTrace([h.detach() for h in interpreterTrace.layers], interpreterTrace.logits.detach(),
                               interpreterTrace.structure)
    logits = studentTrace.logits[ids]
    labels, _ = _targets(rationales, ids, logits.dtype)
    labelLoss = F.cross_entropy(logits, labels)
    target = torch.softmax(interpreter.logits[ids].to(logits.dtype), dim=-1)
    logitsLoss = F.mse_loss(torch.softmax(logits, dim=-1), target)
    semantic = semanticAlignmentLoss(weights, studentTrace, interpreter, ids)
    structural = structuralAlignmentLoss(weights, studentTrace, interpreter, ids)
    total = labelLoss + lambda2 * logitsLoss + lambda3 * semantic + lambda4 * structural
    return StudentLossTerms(labelLoss, logitsLoss, semantic, structural, total, lambda2, lambda3, lambda4)
