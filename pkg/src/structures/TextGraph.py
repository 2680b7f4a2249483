#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#----------------------------------------------------------------------------
# Created By: tag_distill contributors
# ---------------------------------------------------------------------------
""" Text-attributed graph data model, splits and the inductive training view """

import logging
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from errors import ConfigError, ReferentialError
from structures.KeepLargestHeap import KeepLargestHeap

TRAIN = "train"
VAL = "val"
TEST = "test"


class NeighborList(list):
    """
    Ordered list of (neighbor index, text) pairs that remembers whether
    it was truncated at the neighbor cap.
    """
    def __init__(self, items: Iterable[Tuple[int, str]]=(), truncated: bool=False) -> None:
        super().__init__(items)
        self.truncated = truncated


class TextGraph:
    """
    This class implements an immutable text-attributed graph: every node carries
    a text document and edges are undirected, without self-loops.

    Attributes:
        nodeCount: int
            Number of nodes.
        texts: Tuple[str, ...]
            One text per node.
        classNames: Tuple[str, ...]
            Ordered category names.
        goldLabels: Optional[np.ndarray] of shape (nodeCount,)
            Class index per node, -1 where unknown. None when the dataset has no labels.
        nodeIds: Tuple[str, ...]
            External node identifiers, as read from file.
        edges: np.ndarray of shape (edgeCount, 2)
            Undirected edges stored once with u < v, sorted lexicographically.
    """
    def __init__(self,
                texts: Sequence[str],
                edges: Iterable[Tuple[int, int]],
                classNames: Sequence[str],
                goldLabels: Optional[Sequence[int]]=None,
                nodeIds: Optional[Sequence[str]]=None) -> None:
        """
        The constructor for TextGraph class.

        Edges are symmetrized, duplicates collapsed and self-loops dropped.

        Parameters:
            texts: Sequence[str]
                One text per node, node count is its length.
            edges: Iterable[Tuple[int, int]]
                Edge list over node indices, in any direction.
            classNames: Sequence[str]
                Ordered category names.
            goldLabels: Optional[Sequence[int]], default=None
                Class index per node (-1 for unknown).
            nodeIds: Optional[Sequence[str]], default=None
                External identifiers, defaults to the string of the index.
        """
        self.nodeCount = len(texts)
        self.texts: Tuple[str, ...] = tuple(texts)
        self.classNames: Tuple[str, ...] = tuple(classNames)
        self.nodeIds: Tuple[str, ...] = tuple(nodeIds) if nodeIds is not None else tuple(str(i) for i in range(self.nodeCount))
        if len(self.nodeIds) != self.nodeCount:
            raise ValueError(f"Got {len(self.nodeIds)} node ids for {self.nodeCount} texts.")

        if goldLabels is None:
            self.goldLabels: Optional[np.ndarray] = None
        else:
            labels = np.asarray(goldLabels, dtype=np.int64)
            if labels.shape != (self.nodeCount,):
                raise ValueError(f"Gold labels have shape {labels.shape}, expected ({self.nodeCount},).")
            if (labels >= len(self.classNames)).any() or (labels < -1).any():
                raise ValueError(f"Gold label out of range for {len(self.classNames)} classes.")
            labels.flags.writeable = False
            self.goldLabels = labels

        pairs = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if not (0 <= u < self.nodeCount and 0 <= v < self.nodeCount):
                raise ReferentialError(f"Edge ({u}, {v}) references a node outside [0, {self.nodeCount}).")
            if u == v:
                continue
            pairs.add((min(u, v), max(u, v)))
        self.edges = np.array(sorted(pairs), dtype=np.int64).reshape(-1, 2)
        self.edges.flags.writeable = False

        adjacency: List[List[int]] = [[] for _ in range(self.nodeCount)]
        for u, v in self.edges:
            adjacency[u].append(int(v))
            adjacency[v].append(int(u))
        self._neighbors = tuple(np.array(sorted(n), dtype=np.int64) for n in adjacency)
        for n in self._neighbors:
            n.flags.writeable = False
        self._degrees = np.array([len(n) for n in self._neighbors], dtype=np.int64)
        self._degrees.flags.writeable = False

    @property
    def edgeCount(self) -> int:
        return int(self.edges.shape[0])

    @property
    def classCount(self) -> int:
        return len(self.classNames)

    def neighbors(self, node: int) -> np.ndarray:
        """
        Sorted neighbor indices of node.
        """
        return self._neighbors[node]

    def degree(self, node: int) -> int:
        return int(self._degrees[node])

    def degrees(self) -> np.ndarray:
        return self._degrees

    def hasEdge(self, u: int, v: int) -> bool:
        neighbors = self._neighbors[u]
        position = np.searchsorted(neighbors, v)
        return bool(position < neighbors.size and neighbors[position] == v)

    def directedEdges(self) -> np.ndarray:
        """
        Both directions of every edge.

        Returns:
            Array of shape (2, 2*edgeCount), first row sources, second row destinations.
        """
        if self.edgeCount == 0:
            return np.zeros((2, 0), dtype=np.int64)
        return np.concatenate([self.edges.T, self.edges.T[::-1]], axis=1)

    def withEdges(self, edges: Iterable[Tuple[int, int]]) -> 'TextGraph':
        """
        Returns a graph sharing texts and labels but with a different edge set.
        """
        return TextGraph(self.texts, edges, self.classNames,
                         None if self.goldLabels is None else self.goldLabels,
                         self.nodeIds)

    def neighborTexts(self, node: int, cap: int, allowed: Optional[np.ndarray]=None) -> NeighborList:
        """
        Neighbors of node with their texts, for prompt construction.

        Neighbors are ordered by descending degree then ascending index and
        truncated at cap.

        Parameters:
            node: int
                Central node index.
            cap: int
                Maximum number of neighbors returned, at least 1.
            allowed: Optional[np.ndarray] of bool, shape (nodeCount,)
                Mask of nodes whose texts may be returned. None allows every node.

        Returns:
            NeighborList of (neighbor index, text), with the truncated flag set
            when neighbors were cut at cap.
        """
        if not 0 <= node < self.nodeCount:
            raise ValueError(f"Node {node} out of range [0, {self.nodeCount}).")
        heap = KeepLargestHeap(cap)
        for neighbor in self._neighbors[node]:
            if allowed is not None and not allowed[neighbor]:
                continue
            heap.add(((self.degree(neighbor), -int(neighbor)), int(neighbor)))
        if heap.truncated:
            logging.debug(f"Neighbor list of node {node} truncated to {cap}, {heap.dropped} dropped.")
        return NeighborList(((n, self.texts[n]) for _, n in heap.getData()), heap.truncated)


@dataclass(frozen=True)
class SplitAssignment:
    """
    Disjoint train/val/test node sets.

    Attributes:
        trainIds, valIds, testIds: Tuple[int, ...]
            Sorted node indices of each split.
        seed: int
            Seed of the permutation that produced the split.
    """
    trainIds: Tuple[int, ...]
    valIds: Tuple[int, ...]
    testIds: Tuple[int, ...]
    seed: int
    nodeCount: int

    def __post_init__(self) -> None:
        train, val, test = set(self.trainIds), set(self.valIds), set(self.testIds)
        if train & val or train & test or val & test:
            raise ValueError("Split sets are not pairwise disjoint.")
        if len(train | val | test) != self.nodeCount:
            raise ValueError(f"Split covers {len(train | val | test)} of {self.nodeCount} nodes.")

    def tags(self) -> np.ndarray:
        """
        Per-node split tag array.
        """
        tags = np.empty(self.nodeCount, dtype=object)
        tags[list(self.trainIds)] = TRAIN
        tags[list(self.valIds)] = VAL
        tags[list(self.testIds)] = TEST
        return tags

    def mask(self, tag: str) -> np.ndarray:
        """
        Boolean mask of the nodes tagged with tag.
        """
        ids = {TRAIN: self.trainIds, VAL: self.valIds, TEST: self.testIds}[tag]
        mask = np.zeros(self.nodeCount, dtype=bool)
        mask[list(ids)] = True
        return mask


def _roundHalfUp(x: float) -> int:
    return int(np.floor(x + 0.5))


def splitNodes(graph: TextGraph, ratios: Sequence[float], seed: int) -> SplitAssignment:
    """
    Splits nodes uniformly at random into train/val/test.

    Sizes are |train| = round(r0*N), |val| = round(r1*N) (half up) and the test
    set takes the remainder, so 2708 nodes at (0.6, 0.2, 0.2) give (1625, 542, 541).
    The result only depends on the node count, ratios and seed.

    Parameters:
        graph: TextGraph
            Graph whose nodes are split.
        ratios: Sequence[float] of length 3
            Train, val and test fractions, must sum to 1.
        seed: int
            Permutation seed.

    Returns:
        SplitAssignment
    """
    nodeCount = graph.nodeCount
    if len(ratios) != 3 or any(r < 0 for r in ratios):
        raise ConfigError(f"Split ratios must be three non-negative fractions, got {list(ratios)}.")
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ConfigError(f"Split ratios must sum to 1, got {sum(ratios)}.")
    permutation = np.random.default_rng(seed).permutation(nodeCount)
    nTrain = min(_roundHalfUp(ratios[0] * nodeCount), nodeCount)
    nVal = min(_roundHalfUp(ratios[1] * nodeCount), nodeCount - nTrain)
    return SplitAssignment(trainIds=tuple(sorted(int(i) for i in permutation[:nTrain])),
                           valIds=tuple(sorted(int(i) for i in permutation[nTrain:nTrain + nVal])),
                           testIds=tuple(sorted(int(i) for i in permutation[nTrain + nVal:])),
                           seed=seed,
                           nodeCount=nodeCount)


def makeInductiveView(graph: TextGraph, split: SplitAssignment) -> TextGraph:
    """
    Training view of graph in which test nodes are unseen: every edge touching a
    test node is removed. The input graph is left untouched.

    Parameters:
        graph: TextGraph
            Full graph, used unchanged at evaluation.
        split: SplitAssignment
            Split covering graph.

    Returns:
        TextGraph with the same nodes and the filtered edge set.
    """
    if split.nodeCount != graph.nodeCount:
        raise ValueError(f"Split covers {split.nodeCount} nodes but graph has {graph.nodeCount}.")
    isTest = split.mask(TEST)
    keep = ~(isTest[graph.edges[:, 0]] | isTest[graph.edges[:, 1]]) if graph.edgeCount else np.zeros(0, dtype=bool)
    view = graph.withEdges(graph.edges[keep])
    logging.debug(f"Inductive view keeps {view.edgeCount} of {graph.edgeCount} edges.")
    return view
