"""Completion clients: one real wire protocol, two offline stand-ins."""

from __future__ import annotations

import os
import pathlib
import re
import threading
from abc import ABC, abstractmethod

import requests

from ..errors import ClientError

API_KEY_ENV = "QUESTFORGE_API_KEY"

_IDEA_LINE = re.compile(r"^game idea:\s*(.+?)\s*(?:\(required skills:.*\))?\s*$",
                        re.IGNORECASE)


class CompletionClient(ABC):
    """Anything that can turn a prompt into completion text."""

    @abstractmethod
    def complete(self, prompt: str, temperature: float | None = None,
                 max_tokens: int | None = None) -> str:
        ...


class OpenAIChatClient(CompletionClient):
    """Speaks the widely-cloned chat completions wire protocol.

    Only the subset needed here: single user message in, first choice out.
    The key comes from the constructor or the QUESTFORGE_API_KEY variable.
    """

    def __init__(self, base_url: str, model: str, api_key: str | None = None,
                 timeout: float = 60.0):
        self.base_url = base_url.rstrip("/")
        self.model = model
        self.api_key = api_key or os.environ.get(API_KEY_ENV, "")
        self.timeout = timeout

    def complete(self, prompt, temperature=None, max_tokens=None):
        payload = {
            "model": self.model,
            "messages": [{"role": "user", "content": prompt}],
        }
        if temperature is not None:
            payload["temperature"] = temperature
        if max_tokens is not None:
            payload["max_tokens"] = max_tokens
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        try:
            response = requests.post(f"{self.base_url}/chat/completions",
                                     json=payload, headers=headers,
                                     timeout=self.timeout)
        except requests.RequestException as exc:
            raise ClientError(f"request failed: {exc}") from exc
        if response.status_code != 200:
            raise ClientError(f"endpoint returned {response.status_code}: "
                              f"{response.text[:200]}")
        try:
            return response.json()["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError, ValueError) as exc:
            raise ClientError(f"unexpected response shape: {exc}") from exc


def idea_from_prompt(prompt: str) -> str:
    """The idea named by the last 'Game idea:' line (the target block)."""
    found = ""
    for line in prompt.splitlines():
        m = _IDEA_LINE.match(line.strip())
        if m:
            found = m.group(1).strip()
    if not found:
        raise ClientError("prompt contains no 'Game idea:' line")
    return found


class FixtureClient(CompletionClient):
    """Serves canned responses from a directory of <idea-slug>.resp.txt files.

    Stateless and deterministic, so the whole generation pipeline becomes
    reproducible and network-free.
    """

    def __init__(self, directory: str | pathlib.Path):
        self.directory = pathlib.Path(directory)

    def complete(self, prompt, temperature=None, max_tokens=None):
        from .prompting import slugify

        slug = slugify(idea_from_prompt(prompt))
        path = self.directory / f"{slug}.resp.txt"
        if not path.is_file():
            raise ClientError(f"no canned response for {slug!r} in "
                              f"{self.directory}")
        return path.read_text(encoding="utf-8")


class ScriptedClient(CompletionClient):
    """Plays back a fixed response sequence; used to exercise retry paths."""

    def __init__(self, responses: list[str]):
        if not responses:
            raise ValueError("need at least one scripted response")
        self.responses = list(responses)
        self.calls = 0
        self._lock = threading.Lock()

    def complete(self, prompt, temperature=None, max_tokens=None):
        with self._lock:
            index = min(self.calls, len(self.responses) - 1)
            self.calls += 1
            return self.responses[index]
