#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#----------------------------------------------------------------------------
# Created By: tag_distill contributors
# ---------------------------------------------------------------------------
""" Deterministic stand-in for the LLM on synthetic graphs """

import re
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np

from readers.SyntheticGraphReader import SyntheticSpec
from structures.NodeRationale import NodeRationale
from structures.TextGraph import TextGraph

_WORD = re.compile(r"\w+")


def oracleSoftLabel(text: str, spec: SyntheticSpec) -> Tuple[Tuple[float, ...], int]:
    """
    Soft label proportional to the per-class signature word counts of text.

    Parameters:
        text: str
            Node text.
        spec: SyntheticSpec
            Spec that generated the graph.

    Returns:
        Tuple (softLabel, pseudoLabel). The soft label is uniform when text holds
        no signature word; the pseudo-label is its argmax, lowest index on ties.
    """
    owners = spec.wordClasses()
    counts = np.zeros(spec.classCount, dtype=np.float64)
    for word in _WORD.findall(text.lower()):
        if word in owners:
            counts[owners[word]] += 1
    if counts.sum() == 0:
        soft = np.full(spec.classCount, 1.0 / spec.classCount)
    else:
        soft = counts / counts.sum()
    return tuple(float(p) for p in soft), int(np.argmax(soft))


def oracleKeywords(text: str, spec: SyntheticSpec, label: int, cap: int=5) -> List[str]:
    """
    Signature words of class label present in text, in text order, without repeats.
    """
    vocab = {word.lower() for word in spec.signatureVocab[label]}
    keywords: List[str] = []
    for word in _WORD.findall(text):
        if word.lower() in vocab and word not in keywords:
            keywords.append(word)
        if len(keywords) == cap:
            break
    return keywords


def oracleKeyLinks(graph: TextGraph, spec: SyntheticSpec, label: int, neighborIds: Iterable[int],
                   cap: int=5) -> Tuple[Tuple[int, ...], Dict[int, Tuple[str, ...]]]:
    """
    Neighbors sharing the pseudo-label, each with its own signature words as message.
    """
    keyNeighbors = []
    messages = {}
    for neighbor in neighborIds:
        neighbor = int(neighbor)
        _, neighborLabel = oracleSoftLabel(graph.texts[neighbor], spec)
        if neighborLabel == label:
            keyNeighbors.append(neighbor)
            messages[neighbor] = tuple(oracleKeywords(graph.texts[neighbor], spec, neighborLabel, cap))
    return tuple(keyNeighbors), messages


def oracleAnnotate(graph: TextGraph, spec: SyntheticSpec, node: int, neighborIds: Optional[Iterable[int]]=None,
                   keywordCap: int=5, messageCap: int=5) -> NodeRationale:
    """
    Rationale the oracle gives for node.

    Parameters:
        graph: TextGraph
            Graph generated from spec (or a view of it).
        spec: SyntheticSpec
        node: int
        neighborIds: Optional[Iterable[int]], default=None
            Candidate neighbors, every graph neighbor when None.
        keywordCap: int, default=5
        messageCap: int, default=5

    Returns:
        NodeRationale with status 'ok'.
    """
    text = graph.texts[node]
    soft, label = oracleSoftLabel(text, spec)
    candidates = graph.neighbors(node) if neighborIds is None else neighborIds
    keyNeighbors, messages = oracleKeyLinks(graph, spec, label, candidates, messageCap)
    return NodeRationale(node=node, pseudoLabel=label, softLabel=soft,
                         keywords=tuple(oracleKeywords(text, spec, label, keywordCap)),
                         keyNeighbors=keyNeighbors, messages=messages)
