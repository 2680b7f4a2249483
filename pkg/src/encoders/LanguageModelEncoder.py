#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#----------------------------------------------------------------------------
# Created By: tag_distill contributors
# ---------------------------------------------------------------------------
""" Pretrained language model encoder module """

import copy
import logging
from typing import Any, Dict, Iterator, Optional, Sequence

import torch
from transformers import AutoModel, AutoTokenizer

from .TextEncoder import TextEncoder


class LanguageModelEncoder(TextEncoder):
    """
    This class wraps a Hugging Face encoder (bert-base-uncased, distilbert-base-uncased, ...)
    and returns attention-masked mean-pooled last hidden states.

    Attributes:
        modelName: str
            Hugging Face model identifier or local path.
        tokenizer: transformers tokenizer
        model: transformers model
    """
    kind = "trainable-lm"

    def __init__(self, modelName: str="distilbert-base-uncased", maxTokensFull: int=512,
                 maxTokensKeywords: int=48, trainable: bool=True, batchSize: int=32) -> None:
        """
        The constructor for LanguageModelEncoder class.

        Parameters:
            modelName: str, default='distilbert-base-uncased'
                Pretrained weights to load.
            maxTokensFull: int, default=512
                Token cap for full texts.
            maxTokensKeywords: int, default=48
                Token cap for keyword texts.
            trainable: bool, default=True
                Whether the weights are fine-tuned.
            batchSize: int, default=32
                Texts per forward pass.
        """
        logging.info(f"Loading language model {modelName}.")
        self.modelName = modelName
        self.tokenizer = AutoTokenizer.from_pretrained(modelName)
        self.model = AutoModel.from_pretrained(modelName)
        self.batchSize = batchSize
        super().__init__(int(self.model.config.hidden_size), maxTokensFull, maxTokensKeywords, trainable)
        if not trainable:
            self.freeze()

    def freeze(self) -> None:
        self.trainable = False
        self.model.eval()
        for parameter in self.model.parameters():
            parameter.requires_grad_(False)

    def frozenCopy(self) -> 'LanguageModelEncoder':
        """
        Independent frozen copy, used as the reference encoder for text similarity.
        """
        clone = copy.copy(self)
        clone.model = copy.deepcopy(self.model)
        clone.freeze()
        return clone

    def loadWeightsFrom(self, other: 'LanguageModelEncoder') -> None:
        self.model.load_state_dict(other.model.state_dict())

    def parameters(self) -> Iterator[torch.nn.Parameter]:
        return (p for p in self.model.parameters() if p.requires_grad)

    def stateDict(self) -> Dict[str, Any]:
        return copy.deepcopy(self.model.state_dict())

    def loadStateDict(self, state: Dict[str, Any]) -> None:
        self.model.load_state_dict(state)

    def encodeTexts(self, texts: Sequence[str], maxTokens: Optional[int]=None) -> torch.Tensor:
        cap = self.maxTokensFull if maxTokens is None else maxTokens
        outputs = []
        for start in range(0, len(texts), self.batchSize):
            batch = list(texts[start:start + self.batchSize])
            inputs = self.tokenizer(batch, return_tensors="pt", padding=True, truncation=True, max_length=cap)
            hidden = self.model(**inputs).last_hidden_state
            mask = inputs["attention_mask"].unsqueeze(-1).to(hidden.dtype)
            pooled = (hidden * mask).sum(dim=1) / mask.sum(dim=1).clamp(min=1.0)
            blank = torch.tensor([not t.strip() for t in batch])
            outputs.append(torch.where(blank.unsqueeze(-1), torch.zeros_like(pooled), pooled))
        if not outputs:
            return torch.zeros((0, self.dim))
        return torch.cat(outputs)
