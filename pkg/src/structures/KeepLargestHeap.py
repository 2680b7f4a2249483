#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#----------------------------------------------------------------------------
# Created By: tag_distill contributors
# ---------------------------------------------------------------------------
""" Fixed capacity heap module used to cap prompt neighbor lists """

from heapq import heappush, heappushpop, nlargest
from typing import Any, List, Tuple


class KeepLargestHeap():
    """
    This class implements a fixed capacity heap as a wrapper around
    Python heapq that keeps the largest elements seen.

    Upon reaching max capacity, when a new element is added it is inserted into
    the heap and then the smallest one after the addition is removed. The number
    of removed elements is tracked so callers can record truncation.

    Attributes:
        mem: List
            Memory area heapified.
        capacity: int
            Maximum capacity of elements of the heap.
        dropped: int
            Number of elements evicted or rejected because the heap was full.
    """

    def __init__(self, capacity: int) -> None:
        """
        The constructor for KeepLargestHeap class.

        Parameters:
            capacity: int
                Maximum capacity of elements of the heap, must be at least 1.
        """
        if capacity < 1:
            raise ValueError(f"Heap capacity must be at least 1, was {capacity}")
        self.mem: List[Tuple[Any, Any]] = []
        self.capacity = capacity
        self.dropped = 0

    def add(self, element: Tuple[Any, Any]) -> None:
        """
        Adds an element to the heap.

        If the heap is at max capacity, the element is first added and then
        the smallest element is removed from the heap.

        Parameters:
            element: Tuple(Any, Any)
                Element to be added to the heap.
                First field of the tuple is the priority of the element, any
                comparable value (tuples give lexicographic tie-breaks).
                Second field is the data if needed.
        """
        if len(self.mem) < self.capacity:
            heappush(self.mem, element)
        else:
            heappushpop(self.mem, element)
            self.dropped += 1

    def getData(self) -> List[Tuple[Any, Any]]:
        """
        Gets all the data currently on the heap, sorted in decreasing order
        of priority.

        Returns:
            List of tuples of elements on the heap.
        """
        return nlargest(self.capacity, self.mem)

    @property
    def truncated(self) -> bool:
        return self.dropped > 0
