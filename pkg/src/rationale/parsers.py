#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#----------------------------------------------------------------------------
# Created By: tag_distill contributors
# ---------------------------------------------------------------------------
""" Parsers turning raw LLM answers into rationale fragments. All functions are pure. """

import logging
import math
import re
from typing import Dict, Iterable, List, Sequence, Tuple

from errors import ParseError
from utils import occursIn

_PROBABILITIES = re.compile(r"probabilities['\"]?\s*[:=]\s*\[([^\]]*)\]", re.IGNORECASE)
_CATEGORY = re.compile(r"category['\"]?\s*[:=]\s*['\"]?([^'\"}\n]+)", re.IGNORECASE)
_BRACKETED = re.compile(r"\[(.*?)\]", re.DOTALL)
_BRACED = re.compile(r"\{(.*)\}", re.DOTALL)
_KEYLINK_ENTRY = re.compile(r"['\"]?node\s*(\d+)\s*['\"]?\s*:\s*\[(.*?)\]", re.IGNORECASE | re.DOTALL)
_TOKEN = re.compile(r"\w+")


def _stem(token: str) -> str:
    token = token.lower()
    return token[:-1] if len(token) > 3 and token.endswith("s") else token


def _tokens(text: str) -> set:
    return {_stem(t) for t in _TOKEN.findall(text)}


def matchCategory(answer: str, classNames: Sequence[str]) -> int:
    """
    Maps a category string to a class index.

    Case-insensitive exact match first, then the class sharing the most tokens
    (trailing plural 's' ignored), lowest index on ties.

    Parameters:
        answer: str
            Category named by the LLM.
        classNames: Sequence[str]
            Ordered class names.

    Returns:
        Class index.
    """
    cleaned = answer.strip().strip("'\"").strip().lower()
    for index, name in enumerate(classNames):
        if name.lower() == cleaned:
            return index
    answerTokens = _tokens(cleaned)
    best, bestOverlap = -1, 0
    for index, name in enumerate(classNames):
        overlap = len(answerTokens & _tokens(name))
        if overlap > bestOverlap:
            best, bestOverlap = index, overlap
    if best < 0:
        raise ParseError(f"Category '{answer.strip()}' matches none of {list(classNames)}.")
    return best


def _splitItems(content: str) -> List[str]:
    items = []
    for item in content.split(","):
        item = item.strip().strip("'\"`").strip()
        if item:
            items.append(item)
    return items


def _dedupe(words: Iterable[str]) -> List[str]:
    seen = set()
    result = []
    for word in words:
        key = word.lower()
        if key not in seen:
            seen.add(key)
            result.append(word)
    return result


def parseLabelResponse(raw: str, classNames: Sequence[str]) -> Tuple[int, Tuple[float, ...]]:
    """
    Parses '{Probabilities: [...], Category: '...'}' answers.

    Negative probabilities are clamped to 0 and the vector renormalized. The
    category is the final answer: when it disagrees with the argmax of the
    probabilities it wins and the disagreement is logged. An all-zero vector is
    replaced by a one-hot vector on the category.

    Parameters:
        raw: str
            LLM answer.
        classNames: Sequence[str]
            Ordered class names.

    Returns:
        Tuple (pseudoLabel, softLabel).
    """
    match = _PROBABILITIES.search(raw)
    if match is None:
        raise ParseError("No probability list found in label answer.")
    try:
        values = [float(item) for item in _splitItems(match.group(1))]
    except ValueError as e:
        raise ParseError(f"Probability list is not numeric: {e}") from e
    if len(values) != len(classNames):
        raise ParseError(f"Got {len(values)} probabilities for {len(classNames)} classes.")
    if any(not math.isfinite(v) for v in values):
        raise ParseError("Probability list contains non-finite values.")

    categoryMatch = _CATEGORY.search(raw)
    if categoryMatch is None:
        raise ParseError("No category found in label answer.")
    pseudoLabel = matchCategory(categoryMatch.group(1), classNames)

    clamped = [max(v, 0.0) for v in values]
    total = sum(clamped)
    if total <= 0.0:
        logging.warning(f"All-zero probabilities, using a one-hot vector on '{classNames[pseudoLabel]}'.")
        soft = tuple(1.0 if k == pseudoLabel else 0.0 for k in range(len(classNames)))
    else:
        soft = tuple(v / total for v in clamped)

    argmax = max(range(len(soft)), key=lambda k: (soft[k], -k))
    if soft[argmax] > soft[pseudoLabel]:
        logging.info(f"Category '{classNames[pseudoLabel]}' disagrees with most probable class "
                     f"'{classNames[argmax]}', keeping the category.")
    return pseudoLabel, soft


def parseKeywordResponse(raw: str, nodeText: str, cap: int=5) -> List[str]:
    """
    Parses a bracketed keyword list.

    Words that do not occur in nodeText are dropped with a warning; the result
    is deduplicated case-insensitively, keeps answer order and holds at most cap words.

    Parameters:
        raw: str
            LLM answer.
        nodeText: str
            Text the keywords must come from.
        cap: int, default=5

    Returns:
        List of keywords, possibly empty.
    """
    match = _BRACKETED.search(raw)
    if match is None:
        raise ParseError("No bracketed keyword list found in keyword answer.")
    keywords = []
    for word in _splitItems(match.group(1)):
        if occursIn(word, nodeText):
            keywords.append(word)
        else:
            logging.warning(f"Keyword '{word}' does not occur in the node text, dropped.")
    return _dedupe(keywords)[:cap]


def parseKeylinkResponse(raw: str, neighborIds: Iterable[int], cap: int=5) -> Tuple[Tuple[int, ...], Dict[int, Tuple[str, ...]]]:
    """
    Parses '{Node <id>: [...], ...}' answers.

    Entries naming ids outside neighborIds are dropped with a warning, repeated
    ids keep their first entry and message lists are capped at cap words.
    '{}' is a valid answer selecting no neighbor.

    Parameters:
        raw: str
            LLM answer.
        neighborIds: Iterable[int]
            Candidate neighbor indices shown in the prompt.
        cap: int, default=5

    Returns:
        Tuple (keyNeighbors, messages) in answer order.
    """
    braced = _BRACED.search(raw)
    if braced is None:
        raise ParseError("No braced mapping found in key link answer.")
    content = braced.group(1).strip()
    if not content:
        return (), {}
    entries = _KEYLINK_ENTRY.findall(content)
    if not entries:
        raise ParseError(f"Key link answer has no 'Node <id>: [...]' entry: {content[:80]}")

    allowed = set(int(n) for n in neighborIds)
    keyNeighbors: List[int] = []
    messages: Dict[int, Tuple[str, ...]] = {}
    for nodeText, words in entries:
        neighbor = int(nodeText)
        if neighbor not in allowed:
            logging.warning(f"Key link names node {neighbor}, which is not a candidate neighbor, dropped.")
            continue
        if neighbor in messages:
            continue
        keyNeighbors.append(neighbor)
        messages[neighbor] = tuple(_dedupe(_splitItems(words))[:cap])
    return tuple(keyNeighbors), messages
