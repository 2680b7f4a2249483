#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#----------------------------------------------------------------------------
# Created By: tag_distill contributors
# ---------------------------------------------------------------------------
""" Student and interpreter forward passes and prediction """

import logging
from dataclasses import dataclass
from typing import Dict, List, Mapping, Tuple

import numpy as np
import torch

from encoders.TextEncoder import TextEncoder
from structures.NodeRationale import NodeRationale
from structures.TextGraph import TextGraph

from .GraphModel import ForwardTrace, GraphModel, GraphStructure
from .layers import MessageOverride


@dataclass(frozen=True)
class EnhancementFlags:
    """
    Which rationale enhancements the interpreter uses.

    Attributes:
        useKeywords: bool
            Text embeddings from keywords instead of raw texts.
        useKeyEdges: bool
            Message passing restricted to key neighbors.
        useMessages: bool
            First-layer messages on key edges replaced by key message embeddings.
    """
    useKeywords: bool = True
    useKeyEdges: bool = True
    useMessages: bool = True


@dataclass(frozen=True)
class InterpreterPlan:
    """
    Text inputs and edited structure of an interpreter forward pass.

    Attributes:
        keywordLists: Tuple[Tuple[str, ...], ...]
            Per node keywords, empty to encode the raw text.
        texts: Tuple[str, ...]
            Raw texts, used as fallback.
        structure: GraphStructure
            Edges kept after pruning to key neighbors.
        messageEdges: Tuple[int, ...]
            Positions in structure of the edges whose first-layer message is replaced.
        messageWords: Tuple[Tuple[str, ...], ...]
            Key message words, aligned with messageEdges.
        messageFallbacks: Tuple[str, ...]
            Source node raw text per replaced edge, encoded when its words are empty.
    """
    keywordLists: Tuple[Tuple[str, ...], ...]
    texts: Tuple[str, ...]
    structure: GraphStructure
    messageEdges: Tuple[int, ...]
    messageWords: Tuple[Tuple[str, ...], ...]
    messageFallbacks: Tuple[str, ...]


def buildStudentStructure(graph: TextGraph) -> GraphStructure:
    """
    Full neighborhoods of graph, used by the student.
    """
    return GraphStructure.fromGraph(graph)


def _keyNeighbors(graph: TextGraph, rationale: NodeRationale) -> List[int]:
    keyNeighbors = []
    for neighbor in rationale.keyNeighbors:
        if graph.hasEdge(rationale.node, neighbor):
            keyNeighbors.append(int(neighbor))
        else:
            logging.warning(f"Key edge ({neighbor} -> {rationale.node}) is not in the graph view, dropped.")
    return keyNeighbors


def buildInterpreterPlan(graph: TextGraph, rationales: Mapping[int, NodeRationale],
                         flags: EnhancementFlags=EnhancementFlags()) -> InterpreterPlan:
    """
    Edits graph with the rationales.

    A node with a usable rationale and a non-empty set of key neighbors only
    receives messages from those neighbors; any other node keeps its full
    neighborhood. Edges from a key neighbor carry its key message words at the
    first layer.

    Parameters:
        graph: TextGraph
            Training view (or the full graph for evaluation).
        rationales: Mapping[int, NodeRationale]
        flags: EnhancementFlags

    Returns:
        InterpreterPlan
    """
    keyNeighbors: Dict[int, set] = {}
    for node, rationale in rationales.items():
        if rationale.usable:
            kept = _keyNeighbors(graph, rationale)
            if kept:
                keyNeighbors[node] = set(kept)

    directed = graph.directedEdges()
    src, dst = [], []
    messageEdges, messageWords, messageFallbacks = [], [], []
    for source, target in zip(directed[0].tolist(), directed[1].tolist()):
        isKeyEdge = target in keyNeighbors and source in keyNeighbors[target]
        if flags.useKeyEdges and target in keyNeighbors and not isKeyEdge:
            continue
        if flags.useMessages and isKeyEdge:
            messageEdges.append(len(src))
            messageWords.append(tuple(rationales[target].messages.get(source, ())))
            messageFallbacks.append(graph.texts[source])
        src.append(source)
        dst.append(target)

    keywordLists = []
    for node in range(graph.nodeCount):
        rationale = rationales.get(node)
        useful = flags.useKeywords and rationale is not None and rationale.usable
        keywordLists.append(tuple(rationale.keywords) if useful else ())  # type: ignore[union-attr]

    structure = GraphStructure(torch.tensor(src, dtype=torch.int64), torch.tensor(dst, dtype=torch.int64), graph.nodeCount)
    logging.debug(f"Interpreter structure keeps {structure.edgeCount} of {directed.shape[1]} directed edges, "
                  f"{len(messageEdges)} with key messages.")
    return InterpreterPlan(tuple(keywordLists), graph.texts, structure, tuple(messageEdges),
                           tuple(messageWords), tuple(messageFallbacks))


def encodeInterpreterInputs(plan: InterpreterPlan, encoder: TextEncoder) -> Tuple[torch.Tensor, MessageOverride]:
    """
    Text embeddings and first-layer message override of an interpreter pass.
    """
    h0 = encoder.encodeKeywordLists(plan.keywordLists, plan.texts)
    edgeCount = plan.structure.edgeCount
    mask = torch.zeros(edgeCount, dtype=torch.bool)
    values = torch.zeros((edgeCount, encoder.dim), dtype=h0.dtype)
    if plan.messageEdges:
        positions = torch.tensor(plan.messageEdges, dtype=torch.int64)
        mask[positions] = True
        encoded = encoder.encodeKeywordLists(plan.messageWords, plan.messageFallbacks).to(h0.dtype)
        values = values.index_copy(0, positions, encoded)
    return h0, MessageOverride(mask, values)


def forwardStudent(model: GraphModel, graph: TextGraph, encoder: TextEncoder) -> ForwardTrace:
    """
    Student pass on raw texts and full neighborhoods of graph.

    Parameters:
        model: GraphModel
        graph: TextGraph
            Inductive view during training, full graph at evaluation.
        encoder: TextEncoder

    Returns:
        ForwardTrace
    """
    h0 = encoder.encodeTexts(list(graph.texts))
    return model(h0, buildStudentStructure(graph))


def forwardInterpreter(model: GraphModel, plan: InterpreterPlan, encoder: TextEncoder) -> ForwardTrace:
    """
    Interpreter pass on keyword embeddings, pruned neighborhoods and key messages.
    """
    h0, override = encodeInterpreterInputs(plan, encoder)
    return model(h0, plan.structure, override)


def predict(trace: ForwardTrace) -> Tuple[np.ndarray, np.ndarray]:
    """
    Class predictions of a pass.

    Parameters:
        trace: ForwardTrace

    Returns:
        Tuple (labels of shape (nodeCount,), probabilities of shape (nodeCount, classCount)).
        Ties go to the lowest class index.
    """
    with torch.no_grad():
        probabilities = torch.softmax(trace.logits.double(), dim=-1).cpu().numpy()
    return np.argmax(probabilities, axis=1), probabilities
