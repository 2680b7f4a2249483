#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#----------------------------------------------------------------------------
# Created By: tag_distill contributors
# ---------------------------------------------------------------------------
""" Per-node weights of the semantic and structural alignment terms """

import logging
from dataclasses import dataclass
from typing import Dict, Iterable, Mapping, Optional, Sequence

import numpy as np
import torch

from encoders.TextEncoder import TextEncoder, joinKeywords, textSimilarities
from models.forwards import EnhancementFlags
from structures.NodeRationale import NodeRationale
from structures.TextGraph import TextGraph
from utils import sha256Hex

TSV_HEADER = "node\tdegree\tsim_t\tsemantic_weight\tneighbors\tkey_neighbors\tstructural_weight"


@dataclass(frozen=True)
class AlignmentWeightTable:
    """
    Alignment weights of the train nodes, fixed before student training.

    semanticWeight = degree / simT, where simT is the clamped similarity of the
    raw text and the keyword text. structuralWeight = degree * (neighbors - keyNeighbors),
    0 when the node has no key neighbor or the interpreter ignores key edges
    (its full neighborhood is used).

    Attributes:
        nodes: Tuple[int, ...]
        degrees: Tuple[int, ...]
            Degree in the full graph.
        simT: Tuple[float, ...]
        semanticWeights: Tuple[float, ...]
        neighborCounts: Tuple[int, ...]
            Neighbors in the training view.
        keyNeighborCounts: Tuple[int, ...]
            Key neighbors in the training view, equal to neighborCounts when none was selected.
        structuralWeights: Tuple[float, ...]
    """
    nodes: tuple
    degrees: tuple
    simT: tuple
    semanticWeights: tuple
    neighborCounts: tuple
    keyNeighborCounts: tuple
    structuralWeights: tuple

    def __post_init__(self) -> None:
        weights = np.array(self.semanticWeights + self.structuralWeights, dtype=np.float64)
        if not np.isfinite(weights).all() or (weights < 0).any():
            raise ValueError("Alignment weights must be finite and non-negative.")
        object.__setattr__(self, "_position", {n: i for i, n in enumerate(self.nodes)})

    def _positions(self, ids: Sequence[int]) -> list:
        position: Dict[int, int] = self._position  # type: ignore[attr-defined]
        missing = [n for n in ids if n not in position]
        if missing:
            raise ValueError(f"Nodes {missing[:10]} have no alignment weight.")
        return [position[n] for n in ids]

    def semanticTensor(self, ids: Sequence[int]) -> torch.Tensor:
        return torch.tensor([self.semanticWeights[i] for i in self._positions(ids)], dtype=torch.float64)

    def structuralTensor(self, ids: Sequence[int]) -> torch.Tensor:
        return torch.tensor([self.structuralWeights[i] for i in self._positions(ids)], dtype=torch.float64)

    def toTsv(self) -> str:
        lines = [TSV_HEADER]
        for i, node in enumerate(self.nodes):
            lines.append(f"{node}\t{self.degrees[i]}\t{self.simT[i]!r}\t{self.semanticWeights[i]!r}\t"
                         f"{self.neighborCounts[i]}\t{self.keyNeighborCounts[i]}\t{self.structuralWeights[i]!r}")
        return "\n".join(lines) + "\n"

    def writeTsv(self, filepath: str) -> None:
        with open(filepath, "w", encoding="utf-8") as fh:
            fh.write(self.toTsv())

    def fingerprint(self) -> str:
        return sha256Hex(self.toTsv())


def computeAlignmentWeights(graph: TextGraph, view: TextGraph, rationales: Mapping[int, NodeRationale],
                            reference: TextEncoder, trainIds: Optional[Iterable[int]]=None,
                            flags: EnhancementFlags=EnhancementFlags()) -> AlignmentWeightTable:
    """
    Builds the weight table of the train nodes with a usable rationale.

    Parameters:
        graph: TextGraph
            Full graph, degrees are taken from it.
        view: TextGraph
            Training view, neighbor counts are taken from it.
        rationales: Mapping[int, NodeRationale]
        reference: TextEncoder
            Frozen encoder for the text similarity.
        trainIds: Optional[Iterable[int]], default=None
            Nodes to weigh, every rationale node when None.
        flags: EnhancementFlags, default=EnhancementFlags()
            Enhancements of the interpreter. Without keywords the interpreter reads raw
            texts (simT = 1); without key edges it keeps full neighborhoods (structural weight 0).

    Returns:
        AlignmentWeightTable
    """
    candidates = rationales.keys() if trainIds is None else trainIds
    nodes = sorted(int(n) for n in candidates if int(n) in rationales and rationales[int(n)].usable)
    rawTexts = [graph.texts[n] for n in nodes]
    keywordTexts = [joinKeywords(rationales[n].keywords) if flags.useKeywords and rationales[n].keywords
                    else graph.texts[n] for n in nodes]
    similarities = textSimilarities(reference, rawTexts, keywordTexts)

    degrees, neighborCounts, keyCounts, semantic, structural = [], [], [], [], []
    for i, node in enumerate(nodes):
        degree = graph.degree(node)
        neighborCount = view.degree(node)
        keyCount = sum(1 for k in set(rationales[node].keyNeighbors) if view.hasEdge(node, k))
        if keyCount == 0 or not flags.useKeyEdges:
            keyCount = neighborCount
        degrees.append(degree)
        neighborCounts.append(neighborCount)
        keyCounts.append(keyCount)
        semantic.append(float(degree / similarities[i]))
        structural.append(float(degree * (neighborCount - keyCount)))

    table = AlignmentWeightTable(tuple(nodes), tuple(degrees), tuple(float(s) for s in similarities), tuple(semantic),
                                 tuple(neighborCounts), tuple(keyCounts), tuple(structural))
    logging.info(f"Alignment weights for {len(nodes)} nodes, "
                 f"{sum(1 for w in structural if w > 0)} with a non-zero structural weight.")
    return table
