#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#----------------------------------------------------------------------------
# Created By: tag_distill contributors
# ---------------------------------------------------------------------------
""" Abstract file reader class module"""

import abc
from typing import Any


class Reader(metaclass=abc.ABCMeta):
    """
    This abstract class declares functions to read a dataset artifact from a path.

    Attributes:
        filepath: str
            Path of the file or directory to be read.
    """

    def __init__(self, filePath: str) -> None:
        """
        The constructor for abstract Reader class.

        Parameters:
            filepath: str
                Path of the file or directory to be read.
        """
        self.filepath = filePath

    @abc.abstractmethod
    def read(self) -> Any:
        """
        Reads the artifact pointed to by filepath.

        Returns:
            TextGraph for graph readers, EmbeddingMatrix for embedding readers.
        """
        pass
