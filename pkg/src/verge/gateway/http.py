"""OpenAI-compatible chat-completions backend."""

from __future__ import annotations

import logging
import os
import time
from typing import Any, Optional

import httpx

from ..errors import GatewayError, GatewayUnavailable, NetworkError, RateLimited
from .base import StageRequest

log = logging.getLogger(__name__)


class HttpBackend:
    """POSTs each stage request to ``{endpoint}/chat/completions``.

    Network errors, 429 and 5xx responses are retried with exponential
    backoff, ``max_attempts`` attempts in total. The API key comes from
    ``VERGE_API_KEY`` unless given explicitly.
    """

    def __init__(
        self,
        endpoint: Optional[str],
        model: str = "default",
        api_key: Optional[str] = None,
        max_attempts: int = 3,
        backoff_s: float = 1.0,
        timeout_s: float = 120.0,
        transport: Optional[httpx.BaseTransport] = None,
    ):
        if not endpoint:
            raise GatewayUnavailable("no gateway endpoint configured (gateway.endpoint)")
        self.url = endpoint.rstrip("/") + "/chat/completions"
        self.model = model
        self.max_attempts = max(1, max_attempts)
        self.backoff_s = backoff_s
        key = api_key if api_key is not None else os.environ.get("VERGE_API_KEY", "")
        headers = {"Authorization": f"Bearer {key}"} if key else {}
        self.client = httpx.Client(timeout=timeout_s, headers=headers, transport=transport)

    def payload(self, req: StageRequest) -> dict[str, Any]:
        body: dict[str, Any] = {
            "model": self.model,
            "messages": [
                {"role": "system", "content": req.system},
                {"role": "user", "content": req.prompt},
            ],
            "temperature": req.sampling.temperature,
            "top_p": req.sampling.top_p,
            "max_tokens": req.sampling.max_tokens,
        }
        if req.sampling.thinking_budget:
            body["thinking"] = {"type": "enabled", "budget_tokens": req.sampling.thinking_budget}
        return body

    def complete(self, request: StageRequest) -> str:
        body = self.payload(request)
        last: Exception = NetworkError("no attempt made")
        for attempt in range(self.max_attempts):
            if attempt:
                time.sleep(self.backoff_s * 2 ** (attempt - 1))
            try:
                resp = self.client.post(self.url, json=body)
            except httpx.TransportError as exc:
                last = NetworkError(f"{type(exc).__name__}: {exc}")
                log.warning("gateway attempt %d failed: %s", attempt + 1, last)
                continue
            if resp.status_code == 429:
                last = RateLimited(f"rate limited after {attempt + 1} attempt(s)")
                continue
            if resp.status_code >= 500:
                last = NetworkError(f"server error {resp.status_code}")
                continue
            if resp.status_code >= 400:
                raise GatewayError(f"gateway rejected the request: {resp.status_code} {resp.text[:200]}")
            try:
                return resp.json()["choices"][0]["message"]["content"] or ""
            except (ValueError, KeyError, IndexError, TypeError) as exc:
                raise GatewayError(f"unexpected response shape: {exc}") from None
        raise last

    def close(self) -> None:
        self.client.close()
