#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#----------------------------------------------------------------------------
# Created By: tag_distill contributors
# ---------------------------------------------------------------------------
""" Prompt construction for the label, keyword and key-link annotation steps """

from dataclasses import dataclass, replace
from typing import Optional, Sequence, Tuple

from utils import estimateTokens

LABEL = "label"
KEYWORD = "keyword"
KEYLINK = "keylink"
PROMPT_KINDS = (LABEL, KEYWORD, KEYLINK)

TEMPLATE_VERSION = "v1"

REPAIR_INSTRUCTION = ("\n\nYour previous answer could not be parsed (retry {attempt}). "
                      "Reply again using exactly the requested output format and nothing else.")


@dataclass(frozen=True)
class PromptRecord:
    """
    A rendered prompt.

    Attributes:
        kind: str
            'label', 'keyword' or 'keylink'.
        node: int
            Central node index.
        renderedText: str
            Text sent to the client.
        templateVersion: str
            Version of the templates, part of the cache key.
        tokenEstimate: int
            characters/4 estimate of the prompt size.
        exposedNodes: Tuple[int, ...]
            Every node whose text the prompt carries, central node first.
    """
    kind: str
    node: int
    renderedText: str
    templateVersion: str = TEMPLATE_VERSION
    tokenEstimate: int = 0
    exposedNodes: Tuple[int, ...] = ()

    def withRepair(self, attempt: int) -> 'PromptRecord':
        """
        Copy of the prompt with the repair instruction appended for a retry.
        """
        text = self.renderedText + REPAIR_INSTRUCTION.format(attempt=attempt)
        return replace(self, renderedText=text, tokenEstimate=estimateTokens(text))


def _classList(classNames: Sequence[str]) -> str:
    return "[" + ", ".join(classNames) + "]"


def _neighborSection(neighbors: Sequence[Tuple[int, str]]) -> str:
    lines = ["Its neighbors are:"]
    lines += [f"Node {index}: {text}" for index, text in neighbors]
    return "\n".join(lines) + "\n"


def _record(kind: str, node: int, text: str, templateVersion: str, exposed: Sequence[int]) -> PromptRecord:
    return PromptRecord(kind=kind, node=node, renderedText=text, templateVersion=templateVersion,
                        tokenEstimate=estimateTokens(text), exposedNodes=tuple(exposed))


def buildLabelPrompt(node: int, text: str, neighbors: Sequence[Tuple[int, str]], classNames: Sequence[str],
                     subject: str="paper", templateVersion: str=TEMPLATE_VERSION) -> PromptRecord:
    """
    Prompt asking for per-class probabilities and a final category.

    Parameters:
        node: int
            Central node index.
        text: str
            Central node text.
        neighbors: Sequence[Tuple[int, str]]
            Capped (neighbor index, text) list; the section is omitted when empty.
        classNames: Sequence[str]
            Ordered category names, must not be empty.
        subject: str, default='paper'
            What a node is, used in the wording.
        templateVersion: str

    Returns:
        PromptRecord of kind 'label'.
    """
    if not classNames:
        raise ValueError("Label prompt needs at least one class.")
    body = (f"We want to classify a {subject} into the following categories: {_classList(classNames)}. "
            f"Please identify logits-like probabilities for each class and give your final classification.\n"
            f"The {subject} is: {text}\n")
    if neighbors:
        body += _neighborSection(neighbors)
    body += ("Answer in the format {Probabilities: [p1, p2, ...], Category: '<category>'} "
             f"with exactly {len(classNames)} probabilities in the order of the categories above "
             "and the category name copied from the list.")
    return _record(LABEL, node, body, templateVersion, [node] + [index for index, _ in neighbors])


def buildKeywordPrompt(node: int, text: str, pseudoLabel: int, classNames: Sequence[str], keywordCap: int=5,
                       subject: str="paper", templateVersion: str=TEMPLATE_VERSION) -> PromptRecord:
    """
    Prompt asking for at most keywordCap words of the node text that support its pseudo-label.

    Parameters:
        node: int
            Central node index.
        text: str
            Central node text.
        pseudoLabel: int
            Class index obtained from the label step.
        classNames: Sequence[str]
        keywordCap: int, default=5
        subject: str, default='paper'
        templateVersion: str

    Returns:
        PromptRecord of kind 'keyword'.
    """
    words = "word" if keywordCap == 1 else "words"
    body = (f"We want to classify a {subject} into the following categories: {_classList(classNames)}. "
            f"Please identify at most {keywordCap} {words} in the provided text that help most with "
            f"the classification to '{classNames[pseudoLabel]}'.\n"
            f"The {subject} is: {text}\n"
            "Answer with a bracketed list of words copied from the text, for example [word, word].")
    return _record(KEYWORD, node, body, templateVersion, [node])


def buildKeylinkPrompt(node: int, text: str, neighbors: Sequence[Tuple[int, str]], pseudoLabel: int,
                       classNames: Sequence[str], messageCap: int=5, subject: str="paper",
                       network: str="citation network",
                       templateVersion: str=TEMPLATE_VERSION) -> Optional[PromptRecord]:
    """
    Prompt asking for a subset of important neighbors and, for each, at most
    messageCap keywords supporting the central node's pseudo-label.

    Parameters:
        node: int
            Central node index.
        text: str
            Central node text.
        neighbors: Sequence[Tuple[int, str]]
            Candidate (neighbor index, text) list, ids are graph node indices.
        pseudoLabel: int
        classNames: Sequence[str]
        messageCap: int, default=5
        subject: str, default='paper'
        network: str, default='citation network'
        templateVersion: str

    Returns:
        PromptRecord of kind 'keylink', or None for an isolated node (no key links to ask for).
    """
    if not neighbors:
        return None
    words = "keyword" if messageCap == 1 else "keywords"
    body = (f"We want to classify a {subject} in a {network} to the following categories: {_classList(classNames)} "
            f"Please identify a subset of important neighbors and at most {messageCap} {words} of each important "
            f"neighbor that help most to classify the central node into the category of '{classNames[pseudoLabel]}'.\n"
            f"The {subject} is: {text}\n")
    body += _neighborSection(neighbors)
    body += ("Answer in the format {Node <id>: ['keyword', ...], Node <id>: [...]} using only the node ids "
             "listed above, or {} if no neighbor is important.")
    return _record(KEYLINK, node, body, templateVersion, [node] + [index for index, _ in neighbors])
