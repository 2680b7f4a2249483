#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#----------------------------------------------------------------------------
# Created By: tag_distill contributors
# ---------------------------------------------------------------------------
""" Line-delimited text-attributed graph reader and writer module """

import json
import logging
import os
from typing import Dict, List, Optional, Tuple

from errors import ParseError, ReferentialError
from structures.TextGraph import TextGraph
from utils import sha256File

from .Reader import Reader

NODE_FILE = "nodes.tsv"
EDGE_FILE = "edges.tsv"
CLASS_FILE = "classes.txt"
MANIFEST_FILE = "manifest.json"


class TsvGraphReader(Reader):
    """
    Concrete implementation of abstract Reader class for a dataset directory
    holding the three line-delimited files of a text-attributed graph.

    file            line format
    nodes.tsv       <id>\\t<label-or-dash>\\t<JSON-escaped text>
    edges.tsv       <src id>\\t<dst id>
    classes.txt     one category name per line, in class index order
    manifest.json   node count, edge count and checksum (optional)
    """

    def __init__(self, filePath: str) -> None:
        """
        The constructor for TsvGraphReader class.

        Parameters:
            filepath: str
                Dataset directory.
        """
        super().__init__(filePath)

        logging.debug(f"TsvGraphReader created for {filePath}")

    def read(self) -> TextGraph:
        """
        Loads the graph, verifying the manifest checksum when one is present.

        Returns:
            TextGraph
        """
        if not os.path.isdir(self.filepath):
            raise ValueError(f"Dataset directory {self.filepath} does not exist, failed to load graph.")
        manifest = os.path.join(self.filepath, MANIFEST_FILE)
        return loadGraph(os.path.join(self.filepath, NODE_FILE),
                         os.path.join(self.filepath, EDGE_FILE),
                         os.path.join(self.filepath, CLASS_FILE),
                         manifest if os.path.exists(manifest) else None)


def loadGraph(nodeFile: str, edgeFile: str, classFile: str, manifestFile: Optional[str]=None) -> TextGraph:
    """
    Parses the node, edge and class files into a TextGraph.

    Parameters:
        nodeFile: str
            Node records `<id>\\t<label-or-dash>\\t<escaped text>`.
        edgeFile: str
            Edge records `<src>\\t<dst>`.
        classFile: str
            Category names, one per line.
        manifestFile: Optional[str], default=None
            Manifest to verify against.

    Returns:
        TextGraph with symmetrized adjacency, duplicate edges collapsed and
        self-loops dropped.
    """
    classNames = _readClasses(classFile)
    nodeIds, labels, texts = _readNodes(nodeFile, classNames)
    index = {nodeId: i for i, nodeId in enumerate(nodeIds)}
    edges, records = _readEdges(edgeFile, index)

    graph = TextGraph(texts, edges, classNames,
                      labels if any(label >= 0 for label in labels) else None,
                      nodeIds)
    logging.info(f"Loaded graph with {graph.nodeCount} nodes, {records} edge records "
                 f"({graph.edgeCount} undirected edges) and {graph.classCount} classes.")

    if manifestFile is not None:
        with open(manifestFile, "r", encoding="utf-8") as fh:
            manifest = json.load(fh)
        checksum = sha256File([nodeFile, edgeFile, classFile])
        if manifest.get("checksum") != checksum:
            raise ParseError(f"Checksum mismatch for dataset files listed in {manifestFile}.")
        if manifest.get("nodeCount") != graph.nodeCount:
            raise ParseError(f"Manifest declares {manifest.get('nodeCount')} nodes, found {graph.nodeCount}.")
    return graph


def saveGraph(graph: TextGraph, directory: str) -> str:
    """
    Writes graph as nodes.tsv, edges.tsv, classes.txt and manifest.json.

    Parameters:
        graph: TextGraph
            Graph to save.
        directory: str
            Target directory, created if needed.

    Returns:
        Path of the written manifest.
    """
    os.makedirs(directory, exist_ok=True)
    nodeFile = os.path.join(directory, NODE_FILE)
    edgeFile = os.path.join(directory, EDGE_FILE)
    classFile = os.path.join(directory, CLASS_FILE)

    with open(classFile, "w", encoding="utf-8", newline="\n") as fh:
        for name in graph.classNames:
            fh.write(name + "\n")
    with open(nodeFile, "w", encoding="utf-8", newline="\n") as fh:
        for i in range(graph.nodeCount):
            label = "-" if graph.goldLabels is None or graph.goldLabels[i] < 0 else str(int(graph.goldLabels[i]))
            fh.write(f"{graph.nodeIds[i]}\t{label}\t{json.dumps(graph.texts[i], ensure_ascii=False)}\n")
    with open(edgeFile, "w", encoding="utf-8", newline="\n") as fh:
        for u, v in graph.edges:
            fh.write(f"{graph.nodeIds[u]}\t{graph.nodeIds[v]}\n")

    manifest = os.path.join(directory, MANIFEST_FILE)
    with open(manifest, "w", encoding="utf-8") as fh:
        json.dump({"nodeCount": graph.nodeCount,
                   "edgeCount": graph.edgeCount,
                   "checksum": sha256File([nodeFile, edgeFile, classFile])}, fh, indent=2)
    logging.info(f"Saved graph with {graph.nodeCount} nodes and {graph.edgeCount} edges to {directory}.")
    return manifest


def _readClasses(classFile: str) -> List[str]:
    with open(classFile, "r", encoding="utf-8") as fh:
        names = [line.rstrip("\n") for line in fh]
    names = [name for name in names if name.strip()]
    if len(set(names)) != len(names):
        raise ParseError(f"Duplicate class names in {classFile}.")
    return names


def _readNodes(nodeFile: str, classNames: List[str]) -> Tuple[List[str], List[int], List[str]]:
    byName = {name.lower(): i for i, name in enumerate(classNames)}
    nodeIds: List[str] = []
    labels: List[int] = []
    texts: List[str] = []
    seen = set()
    with open(nodeFile, "r", encoding="utf-8") as fh:
        for lineNumber, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            fields = line.split("\t", 2)
            if len(fields) != 3:
                raise ParseError(f"expected 3 tab-separated fields in {nodeFile}, got {len(fields)}", lineNumber)
            nodeId, labelField, textField = fields
            if nodeId in seen:
                raise ParseError(f"duplicate node id '{nodeId}'", lineNumber)
            seen.add(nodeId)
            labels.append(_parseLabel(labelField, byName, len(classNames), lineNumber))
            texts.append(_parseText(textField, lineNumber))
            nodeIds.append(nodeId)
    return nodeIds, labels, texts


def _parseLabel(field: str, byName: Dict[str, int], classCount: int, lineNumber: int) -> int:
    if field == "-":
        return -1
    if field.lstrip("-").isdigit():
        label = int(field)
    elif field.lower() in byName:
        label = byName[field.lower()]
    else:
        raise ParseError(f"unknown label '{field}'", lineNumber)
    if not 0 <= label < classCount:
        raise ParseError(f"label {label} out of range for {classCount} classes", lineNumber)
    return label


def _parseText(field: str, lineNumber: int) -> str:
    if not field.startswith('"'):
        return field
    try:
        text = json.loads(field)
    except json.JSONDecodeError as e:
        raise ParseError(f"malformed escaped text ({e.msg})", lineNumber) from e
    if not isinstance(text, str):
        raise ParseError("escaped text is not a string", lineNumber)
    return text


def _readEdges(edgeFile: str, index: Dict[str, int]) -> Tuple[List[Tuple[int, int]], int]:
    edges: List[Tuple[int, int]] = []
    records = 0
    if not os.path.exists(edgeFile):
        raise ValueError(f"Edge file {edgeFile} does not exist.")
    with open(edgeFile, "r", encoding="utf-8") as fh:
        for lineNumber, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            fields = line.split("\t")
            if len(fields) != 2:
                raise ParseError(f"expected 2 tab-separated fields in {edgeFile}, got {len(fields)}", lineNumber)
            for nodeId in fields:
                if nodeId not in index:
                    raise ReferentialError(f"line {lineNumber}: edge references unknown node '{nodeId}'")
            edges.append((index[fields[0]], index[fields[1]]))
            records += 1
    return edges, records
