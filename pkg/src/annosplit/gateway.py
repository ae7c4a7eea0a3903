"""Uniform interface to LLM backends: query prompts, parse replies, count tokens.

The mock backend is the workhorse for offline runs and tests: it is a pure
function of (seed, instance_id, prompt text, prompt index, spec), so reruns
are byte-identical. Its correctness follows a per-instance latent difficulty
d (probability of the gold label per draw is 1 - d), its reported confidence
is clamp(1 - d + noise, 0, 1), and identical prompt texts reuse the same
draw with probability self_consistency, which makes same-prompt ensembles
far more stable than perturbed ones.

Response parsing is a total function. The decision ladder, in order:
  1. exact label match after normalization (confidence clause stripped),
  2. true/false (or yes/no, agree/disagree) mapping for true_false prompts:
     positive -> probed label; negative -> the other label for binary tasks,
     ambiguous for multi-class (a "no" does not identify a class),
  3. option-letter match for multiple-choice prompts,
  4. unique-substring match of exactly one label (longer labels matched
     first so "not paraphrase" is not double-counted as "paraphrase"),
  5. the ambiguous sentinel.

Token counts are the documented estimate ceil(len(prompt) / 4): costs only
need a consistent, monotone proxy, not vendor-exact tokenization.
"""

from __future__ import annotations

import hashlib
import json
import os
import random
import re
import threading
import time
from dataclasses import dataclass
from pathlib import Path

from .errors import BackendUnavailable, ConfigError, PromptTooLong
from .model import AMBIGUOUS, Annotation, ResponseSet, Source, TaskConfig, normalize_label
from .prompts import (
    AnswerFormat,
    CONFIDENCE_REQUEST,
    PromptSet,
    PromptTemplate,
    default_templates,
    display_label,
    option_letter,
    probe_label,
    template_answer_format,
)

AMBIGUOUS_RESPONSE = "I cannot determine the class of the text."


@dataclass(frozen=True)
class GatewayConfig:
    """Backend selection plus retry/rate-limit behavior."""

    backend: str = "mock"  # "mock" or "live"
    model_name: str = "gpt-3.5-turbo"
    request_timeout: float = 30.0
    max_retries: int = 3
    retry_backoff: tuple[float, ...] = (1.0, 2.0, 4.0)
    rate_limit: float = 10.0  # max requests per second (live backend)
    deterministic: bool = True  # mock only; False salts the seed per process
    max_prompt_chars: int | None = None
    cache_dir: str | None = None  # live responses cached here, keyed by content
    api_base: str = "https://api.openai.com/v1"
    api_key_env: str = "OPENAI_API_KEY"

    def __post_init__(self):
        if self.backend not in ("mock", "live"):
            raise ConfigError(f"unknown backend {self.backend!r}")
        if self.max_retries < 0:
            raise ConfigError("max_retries must be >= 0")
        if self.rate_limit <= 0:
            raise ConfigError("rate_limit must be positive")


@dataclass(frozen=True)
class MockAnnotatorSpec:
    """Behavior knobs for the deterministic mock annotator.

    Difficulties default to [0, 0.5]: per-draw correctness 1 - d then stays
    at or above a coin flip, so low response entropy tracks high accuracy
    the way it does for a real model that is rarely confidently wrong.
    """

    seed: int = 0
    difficulty_low: float = 0.0
    difficulty_high: float = 0.5
    difficulty_map: dict[str, float] | None = None
    ambiguous_rate: float = 0.0
    confidence_noise: float = 0.05
    self_consistency: float = 0.9  # reuse probability for identical prompt texts

    def __post_init__(self):
        for name in ("difficulty_low", "difficulty_high", "ambiguous_rate", "self_consistency"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ConfigError(f"{name} must be in [0, 1], got {v}")
        if self.difficulty_low > self.difficulty_high:
            raise ConfigError("difficulty_low must be <= difficulty_high")
        if self.confidence_noise < 0:
            raise ConfigError("confidence_noise must be nonnegative")
        if self.difficulty_map is not None:
            for iid, d in self.difficulty_map.items():
                if not 0.0 <= d <= 1.0:
                    raise ConfigError(f"difficulty for {iid!r} must be in [0, 1]")


def estimate_tokens(text: str) -> int:
    """Documented token estimate: ceil(characters / 4)."""
    return (len(text) + 3) // 4


def _stable_rng(*parts) -> random.Random:
    key = "\x1f".join(str(p) for p in parts).encode("utf-8")
    digest = hashlib.sha256(key).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


# --- response parsing -------------------------------------------------------

_CONFIDENCE_CLAUSE = re.compile(
    r"[\s,.;:!()-]*(?:and\s+)?(?:my\s+)?confidence(?:\s+score)?\s*(?:is|[:=])?\s*"
    r"(?:[0-9]*\.?[0-9]+)\s*%?\s*[).!]*\s*$",
    re.IGNORECASE,
)
_NUMBER = re.compile(r"([0-9]*\.?[0-9]+)\s*(%?)")
_POSITIVE = re.compile(r"\b(true|yes|agree|agreed)\b")
_NEGATIVE = re.compile(r"\b(false|no|disagree|do not agree|don'?t agree)\b")
_MCQ_PAREN = re.compile(r"\(([a-zA-Z])\)")
_MCQ_BARE = re.compile(r"^\(?([a-zA-Z])[).]?$")


def extract_confidence(raw: str) -> float | None:
    """Last numeral in [0, 1] in the response; 'NN%' is divided by 100."""
    best = None
    for m in _NUMBER.finditer(raw):
        try:
            value = float(m.group(1))
        except ValueError:  # pragma: no cover - regex admits only floats
            continue
        if m.group(2) == "%":
            value /= 100.0
        if 0.0 <= value <= 1.0:
            best = value
    return best


def _strip_confidence_clause(raw: str) -> str:
    return _CONFIDENCE_CLAUSE.sub("", raw)


def _unique_substring_label(normalized: str, labels: tuple[str, ...]) -> str | None:
    # Longer labels claim their spans first so a label embedded in another
    # ("paraphrase" in "not paraphrase") is not spuriously matched.
    masked = normalized
    matched = []
    for label in sorted(labels, key=len, reverse=True):
        if label and label in masked:
            matched.append(label)
            masked = masked.replace(label, "\x00" * len(label))
    if len(matched) == 1:
        return matched[0]
    return None


def parse_response(
    raw: str,
    config: TaskConfig,
    answer_format: AnswerFormat = AnswerFormat.FREE_LABEL,
) -> tuple[str, float | None]:
    """Map raw response text to (label-or-ambiguous, optional confidence).

    Total: never raises, and the first element is always a member of the
    task's label set or the ambiguous sentinel.
    """
    confidence = extract_confidence(raw)
    body = _strip_confidence_clause(raw)
    normalized = normalize_label(body)

    if normalized in config.label_set:
        return normalized, confidence

    if answer_format is AnswerFormat.TRUE_FALSE:
        negative = _NEGATIVE.search(normalized)
        positive = _POSITIVE.search(normalized) if not negative else None
        if negative or positive:
            probe = probe_label(config)
            if positive:
                return probe, confidence
            if len(config.label_set) == 2:
                other = next(l for l in config.label_set if l != probe)
                return other, confidence
            return AMBIGUOUS, confidence

    if answer_format is AnswerFormat.MCQ_LETTER:
        m = _MCQ_PAREN.search(body) or _MCQ_BARE.match(body.strip())
        if m:
            index = ord(m.group(1).upper()) - ord("A")
            if 0 <= index < len(config.label_set):
                return config.label_set[index], confidence

    label = _unique_substring_label(normalized, config.label_set)
    if label is not None:
        return label, confidence

    return AMBIGUOUS, confidence


# --- mock backend -----------------------------------------------------------

class MockBackend:
    """Deterministic stand-in for a chat-completion model."""

    def __init__(
        self,
        spec: MockAnnotatorSpec,
        config: TaskConfig,
        gold_labels: dict[str, str] | None = None,
        salt: str = "",
    ):
        self.spec = spec
        self.config = config
        self.gold_labels = dict(gold_labels or {})
        self.salt = salt

    def difficulty(self, instance_id: str) -> float:
        spec = self.spec
        if spec.difficulty_map is not None and instance_id in spec.difficulty_map:
            return spec.difficulty_map[instance_id]
        u = _stable_rng(spec.seed, self.salt, "difficulty", instance_id).random()
        return spec.difficulty_low + u * (spec.difficulty_high - spec.difficulty_low)

    def true_label(self, instance_id: str) -> str:
        gold = self.gold_labels.get(instance_id)
        if gold is not None:
            return gold
        labels = self.config.label_set
        idx = _stable_rng(self.spec.seed, self.salt, "latent", instance_id).randrange(len(labels))
        return labels[idx]

    def _draw(self, rng: random.Random, instance_id: str) -> tuple[bool, str, float]:
        spec = self.spec
        ambiguous = rng.random() < spec.ambiguous_rate
        gold = self.true_label(instance_id)
        if rng.random() < 1.0 - self.difficulty(instance_id):
            intended = gold
        else:
            others = [l for l in self.config.label_set if l != gold]
            intended = rng.choice(others) if others else gold
        noise = rng.gauss(0.0, spec.confidence_noise) if spec.confidence_noise > 0 else 0.0
        return ambiguous, intended, noise

    def respond(
        self,
        instance_id: str,
        prompt_text: str,
        prompt_index: int,
        answer_format: AnswerFormat,
    ) -> str:
        spec = self.spec
        reuse = (
            _stable_rng(spec.seed, self.salt, "consistency", instance_id, prompt_text, prompt_index).random()
            < spec.self_consistency
        )
        if reuse:
            rng = _stable_rng(spec.seed, self.salt, "draw", instance_id, prompt_text)
        else:
            rng = _stable_rng(spec.seed, self.salt, "draw", instance_id, prompt_text, prompt_index)
        ambiguous, intended, noise = self._draw(rng, instance_id)

        if ambiguous:
            body = AMBIGUOUS_RESPONSE
        elif answer_format is AnswerFormat.TRUE_FALSE:
            body = "True." if intended == probe_label(self.config) else "False."
        elif answer_format is AnswerFormat.MCQ_LETTER:
            index = self.config.label_set.index(intended)
            body = f"({option_letter(index)})."
        else:
            body = f"{display_label(intended)}."

        if CONFIDENCE_REQUEST in prompt_text:
            confidence = min(1.0, max(0.0, 1.0 - self.difficulty(instance_id) + noise))
            body = f"{body} Confidence: {confidence:.2f}"
        return body


# --- live backend -----------------------------------------------------------

class _RateLimiter:
    def __init__(self, per_second: float):
        self.interval = 1.0 / per_second
        self.lock = threading.Lock()
        self.next_at = 0.0

    def wait(self) -> None:
        with self.lock:
            now = time.monotonic()
            delay = self.next_at - now
            self.next_at = max(now, self.next_at) + self.interval
        if delay > 0:
            time.sleep(delay)


class LiveBackend:
    """Chat-completion client with retries, rate limiting, and a disk cache.

    Responses are cached keyed by hash(model, prompt) so reruns are free and
    deterministic. The auth token comes from the configured environment
    variable; it is never written to disk.
    """

    def __init__(self, gateway: GatewayConfig):
        self.gateway = gateway
        self.limiter = _RateLimiter(gateway.rate_limit)
        self.cache_dir = Path(gateway.cache_dir) if gateway.cache_dir else None

    def _cache_path(self, prompt: str) -> Path | None:
        if self.cache_dir is None:
            return None
        key = hashlib.sha256(
            f"{self.gateway.model_name}\x00{prompt}".encode("utf-8")
        ).hexdigest()
        return self.cache_dir / key[:2] / f"{key}.json"

    def complete(self, prompt: str) -> str:
        path = self._cache_path(prompt)
        if path is not None and path.exists():
            return json.loads(path.read_text(encoding="utf-8"))["response"]
        text = self._request(prompt)
        if path is not None:
            path.parent.mkdir(parents=True, exist_ok=True)
            record = {"model": self.gateway.model_name, "response": text}
            path.write_text(json.dumps(record, ensure_ascii=False), encoding="utf-8")
        return text

    def _request(self, prompt: str) -> str:
        import requests

        api_key = os.environ.get(self.gateway.api_key_env)
        if not api_key:
            raise BackendUnavailable(
                f"live backend needs an API key in ${self.gateway.api_key_env}"
            )
        url = f"{self.gateway.api_base.rstrip('/')}/chat/completions"
        payload = {
            "model": self.gateway.model_name,
            "messages": [{"role": "user", "content": prompt}],
        }
        headers = {"Authorization": f"Bearer {api_key}"}
        last_error: Exception | None = None
        for attempt in range(self.gateway.max_retries + 1):
            self.limiter.wait()
            try:
                resp = requests.post(
                    url, json=payload, headers=headers, timeout=self.gateway.request_timeout
                )
            except requests.RequestException as exc:
                last_error = exc
            else:
                if resp.status_code == 200:
                    data = resp.json()
                    return data["choices"][0]["message"]["content"]
                if resp.status_code == 400 and "context" in resp.text.lower():
                    raise PromptTooLong(resp.text[:500])
                if resp.status_code in (429,) or resp.status_code >= 500:
                    last_error = BackendUnavailable(
                        f"HTTP {resp.status_code}: {resp.text[:200]}"
                    )
                else:
                    raise BackendUnavailable(f"HTTP {resp.status_code}: {resp.text[:500]}")
            if attempt < self.gateway.max_retries:
                schedule = self.gateway.retry_backoff
                time.sleep(schedule[min(attempt, len(schedule) - 1)] if schedule else 0.0)
        raise BackendUnavailable(f"retries exhausted: {last_error}")


# --- gateway facade ---------------------------------------------------------

class Gateway:
    """Issues an instance's prompt ensemble and returns parsed annotations."""

    def __init__(
        self,
        gateway_config: GatewayConfig,
        task_config: TaskConfig,
        mock_spec: MockAnnotatorSpec | None = None,
        gold_labels: dict[str, str] | None = None,
        templates: list[PromptTemplate] | None = None,
    ):
        self.gateway_config = gateway_config
        self.task_config = task_config
        self.formats = template_answer_format(templates or default_templates(task_config))
        if gateway_config.backend == "mock":
            salt = "" if gateway_config.deterministic else os.urandom(8).hex()
            self.mock = MockBackend(
                mock_spec or MockAnnotatorSpec(), task_config, gold_labels, salt=salt
            )
            self.live = None
        else:
            self.mock = None
            self.live = LiveBackend(gateway_config)

    def annotate(self, prompt_set: PromptSet) -> ResponseSet:
        """Query every prompt in order; returns exactly k annotations."""
        annotations = []
        limit = self.gateway_config.max_prompt_chars
        for j, rendered in enumerate(prompt_set.prompts, start=1):
            if limit is not None and len(rendered.text) > limit:
                raise PromptTooLong(
                    f"prompt {j} for {prompt_set.instance_id!r} exceeds {limit} chars"
                )
            answer_format = self.formats.get(rendered.prompt_type, AnswerFormat.FREE_LABEL)
            if self.mock is not None:
                raw = self.mock.respond(
                    prompt_set.instance_id, rendered.text, j, answer_format
                )
            else:
                raw = self.live.complete(rendered.text)
            label, confidence = parse_response(raw, self.task_config, answer_format)
            annotations.append(
                Annotation(
                    instance_id=prompt_set.instance_id,
                    prompt_index=j,
                    raw_response=raw,
                    parsed_label=label,
                    confidence=confidence,
                    token_count_in=estimate_tokens(rendered.text),
                    source=Source.LLM,
                )
            )
        return ResponseSet(instance_id=prompt_set.instance_id, annotations=tuple(annotations))


def annotate(
    prompt_set: PromptSet,
    config: TaskConfig,
    gateway: GatewayConfig,
    mock_spec: MockAnnotatorSpec | None = None,
    gold_labels: dict[str, str] | None = None,
    templates: list[PromptTemplate] | None = None,
) -> ResponseSet:
    """One-shot convenience wrapper around Gateway.annotate."""
    return Gateway(gateway, config, mock_spec, gold_labels, templates).annotate(prompt_set)
