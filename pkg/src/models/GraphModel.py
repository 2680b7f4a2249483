#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#----------------------------------------------------------------------------
# Created By: tag_distill contributors
# ---------------------------------------------------------------------------
""" Graph neural network backbone with a classification head """

import logging
import os
from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Optional

import numpy as np
import torch
from torch import nn

from encoders.EmbeddingMatrix import RAW, EmbeddingMatrix
from errors import NumericError
from structures.TextGraph import TextGraph

from .layers import FAMILIES, GCN, MessageOverride, buildLayer

CHECKPOINT_VERSION = 1


@dataclass(frozen=True)
class BackboneConfig:
    """
    Shape of a backbone.

    Attributes:
        family: str
            'gcn-style', 'attention-style' or 'sample-aggregate-style'.
        layers: int
            Message-passing layers, at least 1.
        hiddenDim: int
            Width of every message-passing layer.
        classCount: int
            Output classes of the head.
        inputDim: int
            Width of the text embeddings.
    """
    family: str = GCN
    layers: int = 2
    hiddenDim: int = 256
    classCount: int = 2
    inputDim: int = 1024

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(f"Unknown backbone family '{self.family}', expected one of {FAMILIES}.")
        if self.layers < 1:
            raise ValueError(f"A backbone needs at least 1 layer, got {self.layers}.")
        if self.hiddenDim <= 0 or self.classCount <= 0 or self.inputDim <= 0:
            raise ValueError("Backbone dimensions must be greater than 0.")


@dataclass(frozen=True)
class GraphStructure:
    """
    Directed edge list messages flow along.

    Attributes:
        src, dst: torch.Tensor of int64, shape (edgeCount,)
        nodeCount: int
    """
    src: torch.Tensor
    dst: torch.Tensor
    nodeCount: int

    @staticmethod
    def fromGraph(graph: TextGraph) -> 'GraphStructure':
        """
        Both directions of every edge of graph.
        """
        directed = torch.from_numpy(np.ascontiguousarray(graph.directedEdges()))
        return GraphStructure(directed[0], directed[1], graph.nodeCount)

    @property
    def edgeCount(self) -> int:
        return int(self.src.shape[0])

    def incoming(self, node: int) -> List[int]:
        """
        Sorted sources of the edges ending at node.
        """
        return sorted(int(s) for s in self.src[self.dst == node])


@dataclass
class ForwardTrace:
    """
    Every layer of one forward pass.

    Attributes:
        layers: List[torch.Tensor]
            h_0 (the supplied text embeddings) to h_l, each (nodeCount, width).
        logits: torch.Tensor of shape (nodeCount, classCount)
        structure: GraphStructure
            Edges used by the pass.
    """
    layers: List[torch.Tensor]
    logits: torch.Tensor
    structure: GraphStructure

    @property
    def final(self) -> torch.Tensor:
        return self.layers[-1]

    def embeddingMatrix(self, layer: int, provenance: str=RAW) -> EmbeddingMatrix:
        return EmbeddingMatrix(layer, self.layers[layer].detach().cpu().double().numpy(), provenance)


class GraphModel(nn.Module):
    """
    This class implements l message-passing layers of one family, each followed
    by ReLU, and a linear classification head on the final layer.

    Attributes:
        config: BackboneConfig
        convolutions: nn.ModuleList
        head: nn.Linear
    """
    def __init__(self, config: BackboneConfig, dtype: torch.dtype=torch.float32) -> None:
        """
        The constructor for GraphModel class.

        Parameters:
            config: BackboneConfig
                Backbone shape.
            dtype: torch.dtype, default=torch.float32
                Parameter precision; inputs are cast to it.
        """
        super().__init__()
        self.config = config
        widths = [config.inputDim] + [config.hiddenDim] * config.layers
        self.convolutions = nn.ModuleList(buildLayer(config.family, widths[k], widths[k + 1]) for k in range(config.layers))
        self.head = nn.Linear(config.hiddenDim, config.classCount)
        self.to(dtype)
        self.dtype = dtype
        self.encoderBinding: Dict[str, Any] = {}
        self.extra: Dict[str, Any] = {}

    def forward(self, h0: torch.Tensor, structure: GraphStructure,
                override: Optional[MessageOverride]=None) -> ForwardTrace:  # type: ignore[override]
        """
        Runs message passing over structure.

        Parameters:
            h0: torch.Tensor of shape (nodeCount, inputDim)
                Text embeddings.
            structure: GraphStructure
                Edges used at every layer.
            override: Optional[MessageOverride], default=None
                Replacement message inputs for the first layer only.

        Returns:
            ForwardTrace
        """
        if h0.dim() != 2 or h0.shape[1] != self.config.inputDim:
            raise ValueError(f"Backbone expects inputs of width {self.config.inputDim}, got shape {tuple(h0.shape)}.")
        if h0.shape[0] != structure.nodeCount:
            raise ValueError(f"Got {h0.shape[0]} input rows for {structure.nodeCount} nodes.")
        h = h0.to(self.dtype)
        if not torch.isfinite(h).all():
            raise NumericError("Non-finite text embeddings.", 0)
        layers = [h]
        for k, convolution in enumerate(self.convolutions):
            h = torch.relu(convolution(h, structure.src, structure.dst, override if k == 0 else None))
            if not torch.isfinite(h).all():
                raise NumericError(f"Non-finite activations after message-passing layer {k + 1}.", k + 1)
            layers.append(h)
        return ForwardTrace(layers, self.head(h), structure)

    def saveToFile(self, filepath: str, encoder: Optional[Dict[str, Any]]=None, extra: Optional[Dict[str, Any]]=None) -> None:
        """
        Saves config, parameters and encoder binding to a versioned checkpoint.

        Parameters:
            filepath: str
                Path of file to save to.
            encoder: Optional[Dict[str, Any]]
                Encoder description ('kind', 'dim', ...) and optional 'stateDict'.
            extra: Optional[Dict[str, Any]]
                Any other picklable metadata.
        """
        torch.save({
            "version": CHECKPOINT_VERSION,
            "config": asdict(self.config),
            "dtype": str(self.dtype).replace("torch.", ""),
            "stateDict": self.state_dict(),
            "encoder": encoder or {},
            "extra": extra or {},
        }, filepath)

    @staticmethod
    def loadFromFile(filepath: str) -> 'GraphModel':
        """
        Loads a checkpoint written by saveToFile. The encoder binding and extra
        metadata are attached as `encoderBinding` and `extra`.

        Parameters:
            filepath: str
                Path of file to load from.

        Returns:
            GraphModel in eval mode.
        """
        if not os.path.exists(filepath):
            raise ValueError(f"File {filepath} does not exist, failed to load model from file.")
        checkpoint = torch.load(filepath, map_location="cpu", weights_only=False)
        if checkpoint.get("version") != CHECKPOINT_VERSION:
            raise ValueError(f"Checkpoint {filepath} has version {checkpoint.get('version')}, expected {CHECKPOINT_VERSION}.")
        model = GraphModel(BackboneConfig(**checkpoint["config"]), getattr(torch, checkpoint["dtype"]))
        model.load_state_dict(checkpoint["stateDict"])
        model.encoderBinding = checkpoint["encoder"]
        model.extra = checkpoint["extra"]
        model.eval()
        logging.debug(f"Loaded {model.config.family} model from {filepath}.")
        return model
