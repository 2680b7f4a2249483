#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#----------------------------------------------------------------------------
# Created By: tag_distill contributors
# ---------------------------------------------------------------------------
""" LLM clients: live chat-completion endpoint, synthetic oracle and cache-only replay """

import abc
import logging
import os
import threading
from dataclasses import dataclass
from typing import Optional

from errors import CacheMissError, ConfigError
from readers.SyntheticGraphReader import SyntheticSpec
from structures.TextGraph import TextGraph
from utils import estimateTokens

from .oracle import oracleKeyLinks, oracleKeywords, oracleSoftLabel
from .prompts import KEYLINK, KEYWORD, LABEL, PromptRecord


@dataclass(frozen=True)
class ClientResponse:
    """
    Text returned by a client with its token usage.

    Attributes:
        text: str
        promptTokens: int
        responseTokens: int
        estimated: bool
            True when token counts are characters/4 estimates.
    """
    text: str
    promptTokens: int
    responseTokens: int
    estimated: bool


class LLMClient(metaclass=abc.ABCMeta):
    """
    This abstract class declares a completion client.

    Every call to complete is counted, so callers can assert that a phase
    (e.g. student inference) made no call at all.

    Attributes:
        modelName: str
            Model identifier, part of the cache key.
        callCount: int
            Number of complete calls made so far.
    """
    kind: str = ""

    def __init__(self, modelName: str) -> None:
        self.modelName = modelName
        self.callCount = 0
        self._lock = threading.Lock()

    def complete(self, prompt: PromptRecord) -> ClientResponse:
        """
        Sends prompt to the model.

        Parameters:
            prompt: PromptRecord

        Returns:
            ClientResponse
        """
        with self._lock:
            self.callCount += 1
        return self._complete(prompt)

    @abc.abstractmethod
    def _complete(self, prompt: PromptRecord) -> ClientResponse:
        pass


class OpenAIChatClient(LLMClient):
    """
    Client for an OpenAI-compatible chat-completion endpoint.

    The API key is read from the environment variable named by apiKeyEnv and
    never stored in configuration.
    """
    kind = "live"

    def __init__(self, modelName: str="gpt-3.5-turbo", baseUrl: Optional[str]=None, apiKeyEnv: str="OPENAI_API_KEY",
                 temperature: float=0.0, timeout: float=60.0) -> None:
        """
        The constructor for OpenAIChatClient class.

        Parameters:
            modelName: str, default='gpt-3.5-turbo'
            baseUrl: Optional[str], default=None
                Endpoint base URL, the SDK default when None.
            apiKeyEnv: str, default='OPENAI_API_KEY'
                Environment variable holding the API key.
            temperature: float, default=0.0
            timeout: float, default=60.0
                Request timeout in seconds.
        """
        super().__init__(modelName)
        apiKey = os.environ.get(apiKeyEnv)
        if not apiKey:
            raise ConfigError(f"Live client needs an API key in the environment variable {apiKeyEnv}.")
        from openai import OpenAI
        self.client = OpenAI(base_url=baseUrl or None, api_key=apiKey, timeout=timeout)
        self.temperature = temperature

    def _complete(self, prompt: PromptRecord) -> ClientResponse:
        logging.debug(f"Requesting {prompt.kind} completion for node {prompt.node}.")
        response = self.client.chat.completions.create(
            model=self.modelName,
            messages=[{"role": "user", "content": prompt.renderedText}],
            temperature=self.temperature,
        )
        text = response.choices[0].message.content or ""
        usage = getattr(response, "usage", None)
        if usage is not None and usage.prompt_tokens is not None:
            return ClientResponse(text, int(usage.prompt_tokens), int(usage.completion_tokens or 0), False)
        return ClientResponse(text, prompt.tokenEstimate, estimateTokens(text), True)


class OracleClient(LLMClient):
    """
    Offline client answering prompts about a synthetic graph from its signature
    vocabularies, in the same textual formats an LLM is asked for.
    """
    kind = "oracle"

    def __init__(self, graph: TextGraph, spec: SyntheticSpec, keywordCap: int=5, messageCap: int=5,
                 modelName: str="oracle") -> None:
        super().__init__(modelName)
        self.graph = graph
        self.spec = spec
        self.keywordCap = keywordCap
        self.messageCap = messageCap

    def _complete(self, prompt: PromptRecord) -> ClientResponse:
        text = self.graph.texts[prompt.node]
        soft, label = oracleSoftLabel(text, self.spec)
        if prompt.kind == LABEL:
            probabilities = ", ".join(repr(p) for p in soft)
            answer = f"{{Probabilities: [{probabilities}], Category: '{self.graph.classNames[label]}'}}"
        elif prompt.kind == KEYWORD:
            answer = "[" + ", ".join(oracleKeywords(text, self.spec, label, self.keywordCap)) + "]"
        elif prompt.kind == KEYLINK:
            keyNeighbors, messages = oracleKeyLinks(self.graph, self.spec, label, prompt.exposedNodes[1:], self.messageCap)
            entries = [f"Node {n}: [" + ", ".join(repr(w) for w in messages[n]) + "]" for n in keyNeighbors]
            answer = "{" + ", ".join(entries) + "}"
        else:
            raise ValueError(f"Unknown prompt kind '{prompt.kind}'.")
        return ClientResponse(answer, prompt.tokenEstimate, estimateTokens(answer), True)


class CacheOnlyClient(LLMClient):
    """
    Client that never reaches a model: any request not answered by the
    response cache is a miss.
    """
    kind = "cache-only"

    def _complete(self, prompt: PromptRecord) -> ClientResponse:
        raise CacheMissError(f"No cached response for the {prompt.kind} prompt of node {prompt.node} "
                             f"(model {self.modelName}, template {prompt.templateVersion}). "
                             f"Run annotation once with a live or oracle client to fill the cache.")
