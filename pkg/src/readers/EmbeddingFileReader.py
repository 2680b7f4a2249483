#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#----------------------------------------------------------------------------
# Created By: tag_distill contributors
# ---------------------------------------------------------------------------
""" Binary embedding matrix reader and writer module """

import logging
import os

import numpy as np

from encoders.EmbeddingMatrix import PROVENANCES, EmbeddingMatrix

from .Reader import Reader

MAGIC = b"TAGEMB01"


class EmbeddingFileReader(Reader):
    """
    This class reads precomputed node embeddings from a binary file into an
    EmbeddingMatrix.

    The header and body are stored in raw little endian as shown below.

    field       field type          description
    magic       char[8]             b"TAGEMB01"
    nodeCount   int                 number of rows
    dim         int                 embedding width
    layer       int                 layer tag of the embeddings
    provenance  int                 index into ('raw', 'rationale-enhanced')
    components  double*nodeCount*dim   row-major matrix

    Properties:
        headerDtype: np.dtype
            Structured numpy type of the header.
    """

    headerDtype = np.dtype([("magic", "S8"), ("nodeCount", "<i4"), ("dim", "<i4"),
                            ("layer", "<i4"), ("provenance", "<i4")])

    def __init__(self, filePath: str) -> None:
        """
        The constructor for EmbeddingFileReader class.

        Parameters:
            filepath: str
                Path of file to be read.
        """
        super().__init__(filePath)

        logging.debug(f"EmbeddingFileReader created for {filePath}")

    def read(self) -> EmbeddingMatrix:
        """
        Reads the header then the matrix body.

        Returns:
            EmbeddingMatrix
        """
        if not os.path.exists(self.filepath):
            raise ValueError(f"File {self.filepath} does not exist, failed to load embeddings.")

        header = np.fromfile(self.filepath, dtype=self.headerDtype, count=1)
        if header.size != 1 or header["magic"][0] != MAGIC:
            raise ValueError(f"File {self.filepath} is not an embedding matrix file.")
        nodeCount, dim = int(header["nodeCount"][0]), int(header["dim"][0])
        body = np.fromfile(self.filepath, dtype="<f8", offset=self.headerDtype.itemsize)
        if body.size != nodeCount * dim:
            raise ValueError(f"File {self.filepath} holds {body.size} values, header declares {nodeCount}x{dim}.")
        return EmbeddingMatrix(layer=int(header["layer"][0]),
                               matrix=body.reshape(nodeCount, dim).astype(np.float64),
                               provenance=PROVENANCES[int(header["provenance"][0])])


def writeEmbeddingFile(embeddings: EmbeddingMatrix, filepath: str) -> None:
    """
    Writes embeddings in the format read by EmbeddingFileReader.

    Parameters:
        embeddings: EmbeddingMatrix
            Matrix to export.
        filepath: str
            Target file.
    """
    header = np.zeros(1, dtype=EmbeddingFileReader.headerDtype)
    header["magic"] = MAGIC
    header["nodeCount"] = embeddings.nodeCount
    header["dim"] = embeddings.dim
    header["layer"] = embeddings.layer
    header["provenance"] = PROVENANCES.index(embeddings.provenance)
    with open(filepath, "wb") as fh:
        fh.write(header.tobytes())
        fh.write(np.ascontiguousarray(embeddings.matrix, dtype="<f8").tobytes())
