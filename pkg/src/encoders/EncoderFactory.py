#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#----------------------------------------------------------------------------
# Created By: tag_distill contributors
# ---------------------------------------------------------------------------
""" Encoder factory class module """

from typing import Tuple

from errors import ConfigError

from .HashingEncoder import HashingEncoder
from .TextEncoder import TextEncoder

ENCODER_KINDS = ("hashing-bow", "trainable-lm")


class EncoderFactory:
    """
    Factory class for TextEncoder instances.

    Builds the trainable encoder pair (interpreter and student) together with
    the frozen reference encoder used for text similarity.
    """

    @staticmethod
    def getEncoder(kind: str, dim: int=1024, modelName: str="distilbert-base-uncased",
                   maxTokensFull: int=512, maxTokensKeywords: int=48, trainable: bool=True) -> TextEncoder:
        """
        Static factory function to instantiate a concrete TextEncoder.

        Parameters:
            kind: str
                'hashing-bow' or 'trainable-lm'.
            dim: int, default=1024
                Width of the hashing encoder, ignored for language models.
            modelName: str, default='distilbert-base-uncased'
                Pretrained weights for language models.
            maxTokensFull: int, default=512
            maxTokensKeywords: int, default=48
            trainable: bool, default=True
                Whether a language model encoder is fine-tuned.

        Returns:
            Instantiated TextEncoder.
        """
        if kind == "hashing-bow":
            return HashingEncoder(dim, maxTokensFull, maxTokensKeywords)
        if kind == "trainable-lm":
            # transformers is only imported when a language model is requested
            from .LanguageModelEncoder import LanguageModelEncoder
            return LanguageModelEncoder(modelName, maxTokensFull, maxTokensKeywords, trainable)
        raise ConfigError(f"Unknown encoder kind '{kind}', expected one of {ENCODER_KINDS}.")

    @staticmethod
    def getEncoderTriple(kind: str, **options) -> Tuple[TextEncoder, TextEncoder, TextEncoder]:
        """
        Interpreter encoder, student encoder and frozen reference encoder.

        All three start from the same pretrained weights; the reference encoder is
        never trained.

        Returns:
            Tuple (interpreterEncoder, studentEncoder, referenceEncoder).
        """
        interpreterEncoder = EncoderFactory.getEncoder(kind, **options)
        studentEncoder = EncoderFactory.getEncoder(kind, **options)
        if kind == "trainable-lm":
            reference = interpreterEncoder.frozenCopy()  # type: ignore[attr-defined]
        else:
            reference = EncoderFactory.getEncoder(kind, **options)
        return interpreterEncoder, studentEncoder, reference
