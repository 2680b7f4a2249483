#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#----------------------------------------------------------------------------
# Created By: tag_distill contributors
# ---------------------------------------------------------------------------
""" Per-node LLM rationale record """

import json
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Mapping, Optional, Tuple

import numpy as np

from utils import occursIn

# status values
OK = "ok"
LABELS_ONLY = "labels-only"
FAILED = "failed"


@dataclass(frozen=True)
class NodeRationale:
    """
    Bundle of everything the LLM produced for one train node.

    Attributes:
        node: int
            Node index.
        pseudoLabel: int
            LLM-predicted class index, -1 when the label step never succeeded.
        softLabel: Tuple[float, ...]
            Probability vector over classes.
        keywords: Tuple[str, ...]
            Words of the node text supporting the pseudo-label.
        keyNeighbors: Tuple[int, ...]
            Subset of the node's training-view neighbors selected as key links.
        messages: Dict[int, Tuple[str, ...]]
            Key message words per key neighbor.
        status: str
            'ok', 'labels-only' (rationale steps failed) or 'failed' (no label).
    """
    node: int
    pseudoLabel: int
    softLabel: Tuple[float, ...]
    keywords: Tuple[str, ...] = ()
    keyNeighbors: Tuple[int, ...] = ()
    messages: Dict[int, Tuple[str, ...]] = field(default_factory=dict)
    status: str = OK

    @property
    def usable(self) -> bool:
        """
        Whether the rationale carries a pseudo-label usable as supervision.
        """
        return self.status != FAILED and self.pseudoLabel >= 0

    def checkInvariants(self, classCount: int, neighborIds: Iterable[int], text: str) -> None:
        """
        Raises ValueError if the record breaks a rationale invariant.

        Parameters:
            classCount: int
                Number of classes.
            neighborIds: Iterable[int]
                Neighbors of the node in the training view.
            text: str
                Node text the keywords must come from.
        """
        if self.status == FAILED:
            return
        soft = np.asarray(self.softLabel, dtype=float)
        if soft.shape != (classCount,) or (soft < 0).any() or abs(soft.sum() - 1.0) > 1e-6:
            raise ValueError(f"Node {self.node}: soft label {self.softLabel} is not a probability vector.")
        if not 0 <= self.pseudoLabel < classCount:
            raise ValueError(f"Node {self.node}: pseudo label {self.pseudoLabel} out of range.")
        allowed = set(int(n) for n in neighborIds)
        if not set(self.keyNeighbors) <= allowed:
            raise ValueError(f"Node {self.node}: key neighbors {sorted(set(self.keyNeighbors) - allowed)} are not neighbors.")
        if set(self.messages) - set(self.keyNeighbors):
            raise ValueError(f"Node {self.node}: messages for non-key neighbors.")
        for word in self.keywords:
            if not occursIn(word, text):
                raise ValueError(f"Node {self.node}: keyword '{word}' does not occur in its text.")

    def toRecord(self) -> Dict[str, Any]:
        return {
            "node": self.node,
            "pseudoLabel": self.pseudoLabel,
            "softLabel": list(self.softLabel),
            "keywords": list(self.keywords),
            "keyNeighbors": list(self.keyNeighbors),
            "messages": {str(k): list(v) for k, v in self.messages.items()},
            "status": self.status,
        }

    @staticmethod
    def fromRecord(record: Mapping[str, Any]) -> 'NodeRationale':
        return NodeRationale(node=int(record["node"]),
                             pseudoLabel=int(record["pseudoLabel"]),
                             softLabel=tuple(float(x) for x in record["softLabel"]),
                             keywords=tuple(record.get("keywords", ())),
                             keyNeighbors=tuple(int(n) for n in record.get("keyNeighbors", ())),
                             messages={int(k): tuple(v) for k, v in record.get("messages", {}).items()},
                             status=record.get("status", OK))


def saveRationales(rationales: Mapping[int, NodeRationale], filepath: str) -> None:
    """
    Writes rationales as line-delimited JSON, sorted by node.
    """
    with open(filepath, "w", encoding="utf-8") as fh:
        for node in sorted(rationales):
            fh.write(json.dumps(rationales[node].toRecord(), ensure_ascii=False, sort_keys=True) + "\n")


def loadRationales(filepath: str) -> Dict[int, NodeRationale]:
    """
    Reads rationales written by saveRationales.
    """
    rationales: Dict[int, NodeRationale] = {}
    with open(filepath, "r", encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                rationale = NodeRationale.fromRecord(json.loads(line))
                rationales[rationale.node] = rationale
    return rationales


def usableRationales(rationales: Mapping[int, NodeRationale], nodes: Optional[Iterable[int]]=None) -> List[int]:
    """
    Sorted nodes whose rationale can supervise training.
    """
    candidates = rationales.keys() if nodes is None else [n for n in nodes if n in rationales]
    return sorted(n for n in candidates if rationales[n].usable)
