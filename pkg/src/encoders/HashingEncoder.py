#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#----------------------------------------------------------------------------
# Created By: tag_distill contributors
# ---------------------------------------------------------------------------
""" Hashing bag-of-words encoder wrapper module """

from typing import List, Optional, Sequence

import numpy as np
import torch
from sklearn.feature_extraction import FeatureHasher
from sklearn.feature_extraction.text import HashingVectorizer
from sklearn.preprocessing import normalize

from .TextEncoder import TextEncoder


class HashingEncoder(TextEncoder):
    """
    This class is a wrapper around the scikit-learn hashing utilities that turns
    a text into an L2-normalized bag-of-words count vector.

    https://scikit-learn.org/stable/modules/generated/sklearn.feature_extraction.FeatureHasher.html

    Texts are tokenized with the HashingVectorizer analyzer (lower-cased words of at
    least two characters), truncated at the token cap, hashed to dim buckets with
    unsigned counts and normalized. The encoder is deterministic and parameter-free.
    """
    kind = "hashing-bow"

    def __init__(self, dim: int=1024, maxTokensFull: int=512, maxTokensKeywords: int=48) -> None:
        """
        The constructor for HashingEncoder class.

        Parameters:
            dim: int, default=1024
                Number of hash buckets.
            maxTokensFull: int, default=512
                Token cap for full texts.
            maxTokensKeywords: int, default=48
                Token cap for keyword texts.
        """
        super().__init__(dim, maxTokensFull, maxTokensKeywords, trainable=False)
        self.analyzer = HashingVectorizer(lowercase=True).build_analyzer()
        self.hasher = FeatureHasher(n_features=dim, input_type="string", alternate_sign=False)

    def tokenize(self, text: str, maxTokens: Optional[int]=None) -> List[str]:
        """
        Tokens of text, truncated at maxTokens (maxTokensFull when None).
        """
        cap = self.maxTokensFull if maxTokens is None else maxTokens
        return self.analyzer(text)[:cap]

    def encodeTexts(self, texts: Sequence[str], maxTokens: Optional[int]=None) -> torch.Tensor:
        if len(texts) == 0:
            return torch.zeros((0, self.dim), dtype=torch.float64)
        counts = self.hasher.transform([self.tokenize(text, maxTokens) for text in texts])
        vectors = normalize(counts, norm="l2").toarray().astype(np.float64)
        return torch.from_numpy(vectors)
