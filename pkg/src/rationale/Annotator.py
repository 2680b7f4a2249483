#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#----------------------------------------------------------------------------
# Created By: tag_distill contributors
# ---------------------------------------------------------------------------
""" Three-step LLM annotation of training nodes """

import logging
import threading
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Dict, Iterable, Optional, Set, Tuple, TypeVar

from errors import CacheMissError, ExposureViolationError, ParseError
from structures.NodeRationale import FAILED, LABELS_ONLY, OK, NodeRationale
from structures.TextGraph import TRAIN, SplitAssignment, TextGraph

from .ResponseCache import CacheEntry, ResponseCache, requestHash
from .clients import LLMClient
from .parsers import parseKeylinkResponse, parseKeywordResponse, parseLabelResponse
from .prompts import (TEMPLATE_VERSION, PromptRecord, buildKeylinkPrompt, buildKeywordPrompt,
                      buildLabelPrompt)

T = TypeVar("T")


class TokenLedger:
    """
    Running totals of the prompts and answers used by an annotation pass,
    cached answers included.
    """
    def __init__(self) -> None:
        self.promptCount = 0
        self.responseCount = 0
        self.promptTokens = 0
        self.responseTokens = 0
        self.promptChars = 0
        self.responseChars = 0
        self.estimated = False
        self._lock = threading.Lock()

    def add(self, prompt: PromptRecord, entry: CacheEntry) -> None:
        with self._lock:
            self.promptCount += 1
            self.responseCount += 1
            self.promptTokens += entry.promptTokens
            self.responseTokens += entry.responseTokens
            self.promptChars += len(prompt.renderedText)
            self.responseChars += len(entry.rawResponse)
            self.estimated = self.estimated or entry.estimated

    def toRecord(self) -> Dict[str, Any]:
        return {
            "promptCount": self.promptCount,
            "responseCount": self.responseCount,
            "promptTokens": self.promptTokens,
            "responseTokens": self.responseTokens,
            "promptChars": self.promptChars,
            "responseChars": self.responseChars,
            "estimated": self.estimated,
        }


class Annotator:
    """
    This class implements the label, keyword and key link steps on train nodes.

    Every prompt only carries texts of train-tagged nodes: the central node must
    be a train node and neighbor lists are restricted to train neighbors in the
    training view. Raw answers are cached before they are parsed, and parse
    failures are retried with a repair instruction appended to the prompt.

    Attributes:
        client: LLMClient
        cache: ResponseCache
        view: TextGraph
            Inductive training view.
        split: SplitAssignment
        ledger: TokenLedger
        exposed: Set[int]
            Nodes whose text was placed in a prompt.
    """
    def __init__(self,
                client: LLMClient,
                cache: ResponseCache,
                view: TextGraph,
                split: SplitAssignment,
                neighborCap: int=20,
                keywordCap: int=5,
                messageCap: int=5,
                maxRetries: int=2,
                subject: str="paper",
                network: str="citation network",
                templateVersion: str=TEMPLATE_VERSION,
                workers: int=1) -> None:
        """
        The constructor for Annotator class.

        Parameters:
            client: LLMClient
                Model client.
            cache: ResponseCache
                Replay cache consulted before the client.
            view: TextGraph
                Inductive training view.
            split: SplitAssignment
                Split of the graph; only its train nodes may be exposed.
            neighborCap: int, default=20
                Neighbors listed per prompt.
            keywordCap: int, default=5
            messageCap: int, default=5
            maxRetries: int, default=2
                Extra attempts after a parse failure.
            subject: str, default='paper'
            network: str, default='citation network'
            templateVersion: str
            workers: int, default=1
                Nodes annotated concurrently.
        """
        if neighborCap < 1:
            raise ValueError(f"Neighbor cap must be at least 1, was {neighborCap}")
        if maxRetries < 0:
            raise ValueError(f"maxRetries must be non-negative, was {maxRetries}")
        self.client = client
        self.cache = cache
        self.view = view
        self.split = split
        self.neighborCap = neighborCap
        self.keywordCap = keywordCap
        self.messageCap = messageCap
        self.maxRetries = maxRetries
        self.subject = subject
        self.network = network
        self.templateVersion = templateVersion
        self.workers = max(1, workers)
        self.trainMask = split.mask(TRAIN)
        self.ledger = TokenLedger()
        self.exposed: Set[int] = set()
        self._exposedLock = threading.Lock()

    def _fetch(self, prompt: PromptRecord) -> CacheEntry:
        """
        Cached answer for prompt, asking the client on a miss.
        """
        bad = [n for n in prompt.exposedNodes if not self.trainMask[n]]
        if bad:
            raise ExposureViolationError(f"Prompt for node {prompt.node} carries texts of non-train nodes {bad}.")
        digest = requestHash(self.client.modelName, prompt)
        entry = self.cache.get(digest)
        if entry is None:
            response = self.client.complete(prompt)
            entry = CacheEntry(requestHash=digest, kind=prompt.kind, node=prompt.node, model=self.client.modelName,
                               templateVersion=prompt.templateVersion, rawResponse=response.text,
                               exposedNodes=prompt.exposedNodes, promptTokens=response.promptTokens,
                               responseTokens=response.responseTokens, estimated=response.estimated)
            self.cache.put(entry)
        self.ledger.add(prompt, entry)
        with self._exposedLock:
            self.exposed.update(prompt.exposedNodes)
        return entry

    def _ask(self, prompt: PromptRecord, parse: Callable[[str], Tuple[T, Dict[str, Any]]]) -> Optional[T]:
        """
        Sends prompt and parses the answer, retrying with a repair instruction.

        Returns:
            Parsed value, None once every attempt failed.
        """
        for attempt in range(self.maxRetries + 1):
            current = prompt if attempt == 0 else prompt.withRepair(attempt)
            try:
                entry = self._fetch(current)
            except (CacheMissError, ExposureViolationError):
                raise
            except Exception as e:
                logging.warning(f"Client failed on {prompt.kind} prompt of node {prompt.node}: {e}")
                continue
            try:
                value, record = parse(entry.rawResponse)
            except ParseError as e:
                logging.warning(f"Attempt {attempt + 1} of {prompt.kind} step for node {prompt.node} unparseable: {e}")
                continue
            if entry.parsed is None:
                self.cache.put(entry.withParsed(record))
            return value
        logging.warning(f"{prompt.kind} step for node {prompt.node} failed after {self.maxRetries + 1} attempts.")
        return None

    def annotateNode(self, node: int) -> NodeRationale:
        """
        Runs label, keyword and key link steps for one train node.

        A failed label step gives a 'failed' rationale (no pseudo-label); a failed
        keyword or key link step gives a 'labels-only' rationale without keywords
        or key links. Isolated nodes skip the key link step.

        Parameters:
            node: int
                Train node index.

        Returns:
            NodeRationale satisfying its invariants.
        """
        if not 0 <= node < self.view.nodeCount:
            raise ValueError(f"Node {node} out of range [0, {self.view.nodeCount}).")
        if not self.trainMask[node]:
            raise ExposureViolationError(f"Node {node} is not a train node and cannot be sent to the LLM.")
        classNames = self.view.classNames
        text = self.view.texts[node]
        neighbors = self.view.neighborTexts(node, self.neighborCap, allowed=self.trainMask)

        labelPrompt = buildLabelPrompt(node, text, neighbors, classNames, self.subject, self.templateVersion)
        label = self._ask(labelPrompt, lambda raw: self._parseLabel(raw))
        if label is None:
            uniform = tuple(1.0 / len(classNames) for _ in classNames)
            return NodeRationale(node=node, pseudoLabel=-1, softLabel=uniform, status=FAILED)
        pseudoLabel, softLabel = label

        keywordPrompt = buildKeywordPrompt(node, text, pseudoLabel, classNames, self.keywordCap,
                                           self.subject, self.templateVersion)
        keywords = self._ask(keywordPrompt, lambda raw: self._parseKeywords(raw, text))
        if keywords is None:
            return NodeRationale(node=node, pseudoLabel=pseudoLabel, softLabel=softLabel, status=LABELS_ONLY)

        keylinkPrompt = buildKeylinkPrompt(node, text, neighbors, pseudoLabel, classNames, self.messageCap,
                                           self.subject, self.network, self.templateVersion)
        if keylinkPrompt is None:
            keyLinks: Optional[Tuple[Tuple[int, ...], Dict[int, Tuple[str, ...]]]] = ((), {})
        else:
            candidates = [index for index, _ in neighbors]
            keyLinks = self._ask(keylinkPrompt, lambda raw: self._parseKeyLinks(raw, candidates))
        if keyLinks is None:
            return NodeRationale(node=node, pseudoLabel=pseudoLabel, softLabel=softLabel, status=LABELS_ONLY)

        rationale = NodeRationale(node=node, pseudoLabel=pseudoLabel, softLabel=softLabel, keywords=tuple(keywords),
                                  keyNeighbors=keyLinks[0], messages=keyLinks[1], status=OK)
        rationale.checkInvariants(len(classNames), self.view.neighbors(node), text)
        return rationale

    def _parseLabel(self, raw: str) -> Tuple[Tuple[int, Tuple[float, ...]], Dict[str, Any]]:
        pseudoLabel, softLabel = parseLabelResponse(raw, self.view.classNames)
        return (pseudoLabel, softLabel), {"pseudoLabel": pseudoLabel, "softLabel": list(softLabel)}

    def _parseKeywords(self, raw: str, text: str) -> Tuple[list, Dict[str, Any]]:
        keywords = parseKeywordResponse(raw, text, self.keywordCap)
        return keywords, {"keywords": keywords}

    def _parseKeyLinks(self, raw: str, candidates: Iterable[int]) -> Tuple[Tuple[Tuple[int, ...], Dict[int, Tuple[str, ...]]], Dict[str, Any]]:
        keyNeighbors, messages = parseKeylinkResponse(raw, candidates, self.messageCap)
        record = {"keyNeighbors": list(keyNeighbors), "messages": {str(k): list(v) for k, v in messages.items()}}
        return (keyNeighbors, messages), record

    def annotateNodes(self, nodes: Iterable[int]) -> Dict[int, NodeRationale]:
        """
        Annotates nodes, up to `workers` at a time.

        Parameters:
            nodes: Iterable[int]
                Train node indices.

        Returns:
            Dict node -> NodeRationale.
        """
        nodes = sorted(set(int(n) for n in nodes))
        logging.info(f"Annotating {len(nodes)} nodes with the {self.client.kind} client ({self.workers} workers).")
        if self.workers == 1:
            results = [self.annotateNode(n) for n in nodes]
        else:
            with ThreadPoolExecutor(max_workers=self.workers) as executor:
                results = list(executor.map(self.annotateNode, nodes))
        rationales = {r.node: r for r in results}
        failed = sum(1 for r in results if r.status == FAILED)
        labelsOnly = sum(1 for r in results if r.status == LABELS_ONLY)
        logging.info(f"Annotation done: {len(results) - failed - labelsOnly} ok, {labelsOnly} labels-only, {failed} failed.")
        return rationales


def auditExposure(cache: ResponseCache, split: SplitAssignment) -> Set[int]:
    """
    Non-train nodes whose texts appear in cached requests; empty for valid runs.
    """
    trainIds = set(split.trainIds)
    return {n for n in cache.exposedNodes() if n not in trainIds}
