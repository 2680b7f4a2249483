#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#----------------------------------------------------------------------------
# Created By: tag_distill contributors
# ---------------------------------------------------------------------------
""" Exception hierarchy shared by every stage of the distillation pipeline """

from typing import Optional


class TagDistillError(Exception):
    """
    Base class of all errors raised by this package.
    """


class ConfigError(TagDistillError, ValueError):
    """
    Invalid configuration value or combination of values.
    """


class ParseError(TagDistillError, ValueError):
    """
    Malformed input file line or unparseable LLM response.

    Attributes:
        lineNumber: Optional[int]
            1-based line number of the offending record, if it comes from a file.
    """
    def __init__(self, message: str, lineNumber: Optional[int]=None) -> None:
        if lineNumber is not None:
            message = f"line {lineNumber}: {message}"
        super().__init__(message)
        self.lineNumber = lineNumber


class ReferentialError(TagDistillError, ValueError):
    """
    A record references a node that does not exist.
    """


class ExposureViolationError(TagDistillError):
    """
    A non-train node was about to be exposed to the LLM client.
    """


class CacheMissError(TagDistillError):
    """
    A cache-only client was asked for a response that is not cached.
    """


class AnnotationFailedError(TagDistillError):
    """
    Annotation of a node exhausted its retries.
    """


class NumericError(TagDistillError, ArithmeticError):
    """
    Non-finite activations in a forward pass.

    Attributes:
        layer: int
            Index of the layer that produced the non-finite values.
    """
    def __init__(self, message: str, layer: int) -> None:
        super().__init__(message)
        self.layer = layer


class TrainingDivergenceError(TagDistillError):
    """
    A loss became non-finite during training.
    """


class StageFailure(TagDistillError):
    """
    A pipeline stage failed; carries the stage name for the partial report.
    """
    def __init__(self, stage: str, cause: BaseException) -> None:
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause
