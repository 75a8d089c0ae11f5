"""Self-rating depression scale: prompts, masked-answer backends, score aggregation.

The 20-item scale ships as a versioned JSON asset (``assets/scale.json``).
Each item is a sentence with a single ``[mask]`` slot that a backend fills
with one of four frequency degrees (1=Rarely .. 4=Always). Forward items
score the chosen degree as-is, reversed items score ``5 - degree``. The
per-user result is a 4-vector ``F`` where component ``k`` accumulates the
scores of all items answered with degree ``k``; its normalized form is the
user's symptom distribution.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .errors import ValidationError

N_ITEMS = 20
DEGREES = (1, 2, 3, 4)
DEGREE_WORDS = {1: "Rarely", 2: "Sometimes", 3: "Often", 4: "Always"}
PROMPT_SEPARATOR = " [SEP] "
MASK_TOKEN = "[mask]"


@dataclass(frozen=True)
class ScaleItem:
    index: int
    template: str
    reversed: bool
    scores: dict[int, int]

    def __post_init__(self):
        if self.template.count(MASK_TOKEN) != 1:
            raise ValidationError(
                f"item {self.index}: template must contain exactly one {MASK_TOKEN!r}"
            )
        expected = {k: (5 - k if self.reversed else k) for k in DEGREES}
        if dict(self.scores) != expected:
            raise ValidationError(
                f"item {self.index}: score table {self.scores} inconsistent with "
                f"reversed={self.reversed}"
            )

    def score(self, degree: int) -> int:
        if degree not in DEGREES:
            raise ValidationError(f"item {self.index}: degree {degree} outside {{1..4}}")
        return self.scores[degree]


@dataclass(frozen=True)
class SdsScale:
    version: str
    items: tuple[ScaleItem, ...]

    def __post_init__(self):
        if len(self.items) != N_ITEMS:
            raise ValidationError(f"scale must have {N_ITEMS} items, got {len(self.items)}")
        if [it.index for it in self.items] != list(range(1, N_ITEMS + 1)):
            raise ValidationError("scale items must be indexed 1..20 in order")

    def item(self, index: int) -> ScaleItem:
        return self.items[index - 1]


def load_scale(path=None) -> SdsScale:
    """Load a scale from JSON; defaults to the bundled asset."""
    if path is None:
        text = resources.files("hsnet.assets").joinpath("scale.json").read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    raw = json.loads(text)
    items = tuple(
        ScaleItem(
            index=it["index"],
            template=it["template"],
            reversed=it["reversed"],
            scores={int(k): int(v) for k, v in it["scores"].items()},
        )
        for it in raw["items"]
    )
    return SdsScale(version=raw["version"], items=items)


_DEFAULT_SCALE: SdsScale | None = None


def default_scale() -> SdsScale:
    global _DEFAULT_SCALE
    if _DEFAULT_SCALE is None:
        _DEFAULT_SCALE = load_scale()
    return _DEFAULT_SCALE


@dataclass(frozen=True)
class DegreeAnswer:
    item_index: int
    degree: int

    def __post_init__(self):
        if self.degree not in DEGREES:
            raise ValidationError(
                f"item {self.item_index}: degree {self.degree} outside {{1..4}}"
            )


@dataclass(frozen=True)
class SymptomVector:
    raw: np.ndarray
    normalized: np.ndarray


def render_prompt(post_text: str, item: ScaleItem) -> str:
    """Concatenate the post and the masked symptom sentence.

    An empty post renders as ``"[SEP] <template>"`` (no leading space) so
    the output stays bit-stable for audit logs.
    """
    if post_text:
        return f"{post_text}{PROMPT_SEPARATOR}{item.template}"
    return f"{PROMPT_SEPARATOR.lstrip()}{item.template}"


def aggregate_scores(answers: list[DegreeAnswer], scale: SdsScale) -> SymptomVector:
    """Accumulate per-item scores into the 4-component symptom vector.

    Component ``k`` receives the score of every item whose answer was degree
    ``k``; other components receive nothing from that item. The normalized
    form always exists because every answer contributes at least 1.
    """
    seen = sorted(a.item_index for a in answers)
    expected = list(range(1, N_ITEMS + 1))
    if seen != expected:
        missing = sorted(set(expected) - set(seen))
        dupes = sorted({i for i in seen if seen.count(i) > 1})
        parts = []
        if missing:
            parts.append(f"missing items {missing}")
        if dupes:
            parts.append(f"duplicate items {dupes}")
        raise ValidationError("bad answer set: " + "; ".join(parts))
    raw = np.zeros(4, dtype=np.float64)
    for ans in answers:
        raw[ans.degree - 1] += scale.item(ans.item_index).score(ans.degree)
    return SymptomVector(raw=raw, normalized=raw / raw.sum())


def _post_bytes(post) -> bytes:
    if isinstance(post, str):
        return post.encode("utf-8")
    return np.asarray(post, dtype=np.float64).tobytes()


class AnswerBackend:
    """Maps a (post, rendered prompt) pair to a frequency degree per item."""

    def answer(self, post, prompt: str, item_index: int) -> int:
        raise NotImplementedError


class DeterministicMock(AnswerBackend):
    """Hermetic stand-in backend: a seeded hash of the inputs picks the degree.

    Deterministic for identical (post, prompt, seed); accepts either post
    text or a post embedding as the post input.
    """

    def __init__(self, seed: int = 0):
        self.seed = seed

    def answer(self, post, prompt: str, item_index: int) -> int:
        h = hashlib.sha256()
        h.update(str(self.seed).encode())
        h.update(b"\x00")
        h.update(_post_bytes(post))
        h.update(b"\x00")
        h.update(prompt.encode("utf-8"))
        return 1 + h.digest()[0] % 4


class FixedAnswerBackend(AnswerBackend):
    """Table-driven fixture backend: item index -> degree (or one degree for all)."""

    def __init__(self, degrees):
        if isinstance(degrees, int):
            self.degrees = {i: degrees for i in range(1, N_ITEMS + 1)}
        else:
            self.degrees = dict(degrees)

    def answer(self, post, prompt: str, item_index: int) -> int:
        return self.degrees[item_index]


@dataclass
class AuditEntry:
    item_index: int
    prompt: str
    degree: int
    degree_word: str
    score: int

    def to_json_obj(self) -> dict:
        return {
            "item": self.item_index,
            "prompt": self.prompt,
            "degree": self.degree,
            "degree_word": self.degree_word,
            "score": self.score,
        }


def map_user(
    post, scale: SdsScale, backend: AnswerBackend
) -> tuple[list[DegreeAnswer], SymptomVector, list[AuditEntry]]:
    """Run every item through the backend and aggregate the answers.

    ``post`` may be the raw post text or a post embedding, depending on what
    the backend consumes. The audit log carries one entry per item with the
    rendered prompt and the chosen degree.
    """
    post_text = post if isinstance(post, str) else ""
    answers: list[DegreeAnswer] = []
    audit: list[AuditEntry] = []
    for item in scale.items:
        prompt = render_prompt(post_text, item)
        try:
            degree = backend.answer(post, prompt, item.index)
        except Exception as exc:
            raise ValidationError(f"backend failed on item {item.index}: {exc}") from exc
        ans = DegreeAnswer(item_index=item.index, degree=degree)
        answers.append(ans)
        audit.append(
            AuditEntry(
                item_index=item.index,
                prompt=prompt,
                degree=degree,
                degree_word=DEGREE_WORDS[degree],
                score=item.score(degree),
            )
        )
    return answers, aggregate_scores(answers, scale), audit
