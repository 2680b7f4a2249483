#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#----------------------------------------------------------------------------
# Created By: tag_distill contributors
# ---------------------------------------------------------------------------
""" Module containing assorted utility functions """

import hashlib
import logging
import math
import random
import re
import sys
from typing import Iterable

import numpy as np
import torch


def configureLogging(logLevel: str) -> None:
    """
    Function to set up logging settings.

    Sets the log level, redirects output to stdout and
    formats log messages.

    Parameters:
        logLevel: str
            Log level to be set for logging.
            One of the following in order of most restrictive to most verbose.
                'CRITICAL'
                'FATAL'
                'ERROR'
                'WARN'/'WARNING'
                'INFO'
                'DEBUG'
    """
    root = logging.getLogger()
    root.setLevel(logging.getLevelName(logLevel))

    # the CLI may configure twice when verbs chain stages
    for handler in list(root.handlers):
        if getattr(handler, "_tagDistill", False):
            root.removeHandler(handler)

    handler = logging.StreamHandler(sys.stdout)
    handler.setLevel(logging.getLevelName(logLevel))
    formatter = logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s')
    handler.setFormatter(formatter)
    handler._tagDistill = True  # type: ignore[attr-defined]
    root.addHandler(handler)


def seedEverything(seed: int) -> None:
    """
    Seeds python, numpy and torch random number generators and
    asks torch for deterministic kernels.

    Parameters:
        seed: int
            Seed value.
    """
    random.seed(seed)
    np.random.seed(seed)
    torch.manual_seed(seed)
    torch.use_deterministic_algorithms(True, warn_only=True)


def sha256Hex(*parts: str) -> str:
    """
    Digest of the given strings, separated by a NUL byte.
    """
    digest = hashlib.sha256()
    for i, part in enumerate(parts):
        if i > 0:
            digest.update(b"\x00")
        digest.update(part.encode("utf-8"))
    return digest.hexdigest()


def sha256File(paths: Iterable[str]) -> str:
    """
    Digest over the concatenated bytes of several files.

    Parameters:
        paths: Iterable[str]
            Files to hash, in order.

    Returns:
        Hex digest string.
    """
    digest = hashlib.sha256()
    for path in paths:
        with open(path, "rb") as fh:
            for block in iter(lambda: fh.read(1 << 16), b""):
                digest.update(block)
    return digest.hexdigest()


def estimateTokens(text: str) -> int:
    """
    Token estimate used when the client does not report usage: characters/4, rounded up.
    """
    return math.ceil(len(text) / 4)


def torchDtype(precision: str) -> torch.dtype:
    """
    Maps a precision name from the configuration to a torch dtype.

    Parameters:
        precision: str
            'float32' or 'float64'.

    Returns:
        torch.dtype
    """
    if precision == "float32":
        return torch.float32
    if precision == "float64":
        return torch.float64
    raise ValueError(f"Unknown precision '{precision}', expected float32 or float64.")


def occursIn(word: str, text: str) -> bool:
    """
    Case-insensitive whole-word occurrence of word (possibly several words) in text.
    """
    word = word.strip().lower()
    if not word:
        return False
    return re.search(r"(?<!\w)" + re.escape(word) + r"(?!\w)", text.lower()) is not None
