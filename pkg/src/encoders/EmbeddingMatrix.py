#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#----------------------------------------------------------------------------
# Created By: tag_distill contributors
# ---------------------------------------------------------------------------
""" Per-node embedding matrix at a named layer """

from dataclasses import dataclass

import numpy as np

RAW = "raw"
ENHANCED = "rationale-enhanced"
PROVENANCES = (RAW, ENHANCED)


@dataclass(frozen=True)
class EmbeddingMatrix:
    """
    Dense per-node vectors produced at one layer of a model.

    Attributes:
        layer: int
            0 for text embeddings, l for the final message-passing layer.
        matrix: np.ndarray of shape (nodeCount, dim)
            Row n is the embedding of node n.
        provenance: str
            'raw' or 'rationale-enhanced'.
    """
    layer: int
    matrix: np.ndarray
    provenance: str = RAW

    def __post_init__(self) -> None:
        if self.provenance not in PROVENANCES:
            raise ValueError(f"Unknown provenance '{self.provenance}', expected one of {PROVENANCES}.")
        if self.matrix.ndim != 2:
            raise ValueError(f"Embedding matrix must be 2 dimensional, got shape {self.matrix.shape}.")
        if not np.isfinite(self.matrix).all():
            raise ValueError(f"Embedding matrix at layer {self.layer} has non-finite entries.")

    @property
    def nodeCount(self) -> int:
        return int(self.matrix.shape[0])

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[1])
