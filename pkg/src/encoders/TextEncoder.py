#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#----------------------------------------------------------------------------
# Created By: tag_distill contributors
# ---------------------------------------------------------------------------
""" Abstract text encoder module and the text similarity used by alignment weights """

import abc
import logging
from typing import Any, Dict, Iterator, Optional, Sequence

import numpy as np
import torch
from sklearn.metrics.pairwise import cosine_similarity

SIMILARITY_FLOOR = 0.05


class TextEncoder(metaclass=abc.ABCMeta):
    """
    This abstract class declares the text-to-vector encoder used for raw texts,
    keyword texts and key message texts.

    Attributes:
        kind: str
            'hashing-bow' or 'trainable-lm'.
        dim: int
            Embedding width.
        maxTokensFull: int
            Token cap for full texts.
        maxTokensKeywords: int
            Token cap for keyword and message texts.
        trainable: bool
            Whether the encoder has parameters updated during training.
    """
    kind: str = ""

    def __init__(self, dim: int, maxTokensFull: int=512, maxTokensKeywords: int=48, trainable: bool=False) -> None:
        """
        The constructor for abstract TextEncoder class.

        Parameters:
            dim: int
                Embedding width, must be greater than 0.
            maxTokensFull: int, default=512
                Token cap for full texts.
            maxTokensKeywords: int, default=48
                Token cap for keyword and message texts.
            trainable: bool, default=False
                Whether gradients flow into the encoder.
        """
        if dim <= 0:
            raise ValueError(f"Encoder dimension must be greater than 0, was {dim}")
        if maxTokensFull <= 0 or maxTokensKeywords <= 0:
            raise ValueError("Token caps must be greater than 0")
        self.dim = dim
        self.maxTokensFull = maxTokensFull
        self.maxTokensKeywords = maxTokensKeywords
        self.trainable = trainable

    @abc.abstractmethod
    def encodeTexts(self, texts: Sequence[str], maxTokens: Optional[int]=None) -> torch.Tensor:
        """
        Encodes a batch of texts.

        Parameters:
            texts: Sequence[str]
                Texts to encode. Empty texts give zero rows.
            maxTokens: Optional[int], default=None
                Token cap, maxTokensFull when None.

        Returns:
            Tensor of shape (len(texts), dim).
        """
        pass

    def parameters(self) -> Iterator[torch.nn.Parameter]:
        return iter(())

    def stateDict(self) -> Dict[str, Any]:
        """
        Copy of the trainable weights, empty for parameter-free encoders.
        """
        return {}

    def loadStateDict(self, state: Dict[str, Any]) -> None:
        pass

    def encodeText(self, text: str) -> torch.Tensor:
        """
        Encodes a single text truncated at maxTokensFull.

        Returns:
            Tensor of shape (dim,), zero with a warning when text is blank.
        """
        if not text.strip():
            logging.warning("Encoding an empty text, returning a zero vector.")
        return self.encodeTexts([text])[0]

    def encodeKeywords(self, keywords: Sequence[str], fallbackText: str="") -> torch.Tensor:
        """
        Encodes keywords joined by single spaces under maxTokensKeywords.

        Parameters:
            keywords: Sequence[str]
                Keyword list.
            fallbackText: str, default=""
                Raw text encoded instead when keywords is empty.

        Returns:
            Tensor of shape (dim,).
        """
        if not keywords:
            return self.encodeText(fallbackText)
        return self.encodeTexts([joinKeywords(keywords)], self.maxTokensKeywords)[0]

    def encodeKeywordLists(self, keywordLists: Sequence[Sequence[str]], fallbackTexts: Sequence[str]) -> torch.Tensor:
        """
        Batched encodeKeywords: rows with keywords use the keyword cap, rows
        without fall back to their raw text under the full cap.
        """
        rows: list = [None] * len(keywordLists)
        withKeywords = [i for i, kw in enumerate(keywordLists) if kw]
        without = [i for i, kw in enumerate(keywordLists) if not kw]
        if withKeywords:
            encoded = self.encodeTexts([joinKeywords(keywordLists[i]) for i in withKeywords], self.maxTokensKeywords)
            for j, i in enumerate(withKeywords):
                rows[i] = encoded[j]
        if without:
            encoded = self.encodeTexts([fallbackTexts[i] for i in without])
            for j, i in enumerate(without):
                rows[i] = encoded[j]
        if not rows:
            return torch.zeros((0, self.dim), dtype=torch.float64)
        return torch.stack(rows)


def joinKeywords(keywords: Sequence[str]) -> str:
    return " ".join(keywords)


def textSimilarity(ref: TextEncoder, a: str, b: str) -> float:
    """
    Cosine similarity of the reference encoder embeddings of a and b, clamped
    to [0.05, 1] so that degree/similarity weights stay bounded.

    Parameters:
        ref: TextEncoder
            Frozen reference encoder.
        a, b: str
            Texts to compare.

    Returns:
        float in [0.05, 1].
    """
    return float(textSimilarities(ref, [a], [b])[0])


def textSimilarities(ref: TextEncoder, left: Sequence[str], right: Sequence[str]) -> np.ndarray:
    """
    Row-wise clamped cosine similarities between two equally long text lists.
    """
    if len(left) != len(right):
        raise ValueError(f"Similarity inputs differ in length: {len(left)} vs {len(right)}.")
    if not left:
        return np.zeros(0)
    with torch.no_grad():
        a = ref.encodeTexts(list(left)).detach().double().cpu().numpy()
        b = ref.encodeTexts(list(right)).detach().double().cpu().numpy()
    raw = np.array([cosine_similarity(a[i:i+1], b[i:i+1])[0, 0] for i in range(len(left))])
    return np.clip(raw, SIMILARITY_FLOOR, 1.0)
