#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#----------------------------------------------------------------------------
# Created By: tag_distill contributors
# ---------------------------------------------------------------------------
""" Reader factory class module for graph datasets and embedding files"""

import os
from typing import ClassVar, Optional, Type

from .EmbeddingFileReader import EmbeddingFileReader
from .Reader import Reader
from .SyntheticGraphReader import SyntheticGraphReader
from .TsvGraphReader import TsvGraphReader


class ReaderFactory:
    """
    Factory class for Reader class instances.

    Instantiates a concrete Reader instance depending on the path or
    requested format.
    """
    readerImplementations: ClassVar[dict[str, Type[Reader]]] = {
        "tsv": TsvGraphReader,
        "synthetic": SyntheticGraphReader,
        "emb": EmbeddingFileReader,
    }

    @staticmethod
    def getFormat(datasetPath: str) -> str:
        """
        Static helper function for parsing the format of a path.

        Directories are dataset directories ('tsv'); files use their extension.

        Parameters:
            datasetPath: str
                Path to parse the format of.

        Returns:
            String containing the format.
        """
        if os.path.isdir(datasetPath):
            return "tsv"
        dotPosition = datasetPath.rfind(".")
        if dotPosition == -1:
            return ""
        return datasetPath[dotPosition+1:]

    @staticmethod
    def getReader(datasetPath: str, format: Optional[str]=None) -> Reader:
        """
        Static factory function to instantiate concrete Reader.

        Automatically parses the path to decide which Reader to instantiate if
        format is None. Supports tsv dataset directories, synthetic spec files and
        emb embedding files by default with other formats being able to be registered.

        Parameters:
            datasetPath: str
                Path to get a Reader for.
            format: str, default=None
                Requested reader format, if None, the path is parsed.

        Returns:
            Instantiated Reader for specified path.
        """
        if format is None:
            format = ReaderFactory.getFormat(datasetPath)

        if format in ReaderFactory.readerImplementations:
            return ReaderFactory.readerImplementations[format](datasetPath)
        else:
            raise ValueError(f"No reader registered for format '{format}' ({datasetPath}).")

    @staticmethod
    def registerReader(format: str, reader: Type[Reader]) -> None:
        """
        Registers a Reader as associated with the specified format, allowing the
        factory to instantiate this new implementation.

        Parameters:
            format: str
                Format name to be associated with reader.
            reader: Type[Reader]
                Reader implementation to be registered and associated with format.
        """
        ReaderFactory.readerImplementations[format] = reader
