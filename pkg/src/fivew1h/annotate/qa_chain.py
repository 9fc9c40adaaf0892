"""Q&A prompt chaining: six ordered extractive-QA calls with answer reuse.

Earlier answers are slotted into later prompts when their confidence clears
the gate written into the prompt file: the what prompt reuses the who answer
at >= 0.5, the why/how prompts reuse the what answer at >= 0.2 (falling back
to the who answer at >= 0.5, then to generic wording). An answer is retained
in the document only at confidence >= the retention threshold (0.5).
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Protocol

from ..document import QUESTIONS, AnnotatedDocument, QaAnswer

log = logging.getLogger(__name__)

DATA_DIR = Path(__file__).resolve().parent.parent / "data"

DEFAULT_RETENTION_THRESHOLD = 0.5


class QaCallable(Protocol):
    def __call__(self, context: str, question: str) -> tuple[str, float]: ...


@dataclass(frozen=True)
class QaTemplate:
    template: str
    requires: dict[str, float]

    def applies(self, raw_scores: dict[str, float]) -> bool:
        return all(raw_scores.get(q, 0.0) >= gate for q, gate in self.requires.items())

    def render(self, raw_answers: dict[str, str]) -> str:
        return self.template.format(
            who_answer=raw_answers.get("who", ""),
            what_answer=raw_answers.get("what", ""),
        )


@dataclass(frozen=True)
class QaPromptSet:
    by_question: dict[str, tuple[QaTemplate, ...]]

    def select(self, question: str, raw_scores: dict[str, float]) -> QaTemplate:
        for tpl in self.by_question[question]:
            if tpl.applies(raw_scores):
                return tpl
        raise ValueError(f"no applicable template for {question!r}; prompt set must end with a generic template")


def load_qa_prompts(path: str | Path | None = None) -> QaPromptSet:
    path = Path(path) if path else DATA_DIR / "qa_prompts.json"
    raw = json.loads(path.read_text(encoding="utf-8"))
    by_question: dict[str, tuple[QaTemplate, ...]] = {}
    for question in QUESTIONS:
        templates = tuple(
            QaTemplate(template=rec["template"], requires=dict(rec.get("requires", {})))
            for rec in raw[question]
        )
        if not templates or templates[-1].requires:
            raise ValueError(f"{path}: question {question!r} needs a final gate-free template")
        by_question[question] = templates
    return QaPromptSet(by_question=by_question)


def run_qa_chain(
    doc: AnnotatedDocument,
    qa_provider: QaCallable,
    prompts: QaPromptSet,
    retention_threshold: float = DEFAULT_RETENTION_THRESHOLD,
    on_prompt: Callable[[str, str], None] | None = None,
) -> list[QaAnswer]:
    """Run the six-question chain over the article body.

    Exactly one provider call per question, in the order
    who, what, when, where, why, how. Returns at most one retained answer
    per question. Provider failure logs a warning and yields no answers;
    the pipeline never aborts on it.
    """
    context = doc.article.body
    raw_answers: dict[str, str] = {}
    raw_scores: dict[str, float] = {}
    retained: list[QaAnswer] = []
    for question in QUESTIONS:
        template = prompts.select(question, raw_scores)
        prompt = template.render(raw_answers)
        if on_prompt is not None:
            on_prompt(question, prompt)
        try:
            text, confidence = qa_provider(context, prompt)
        except Exception as exc:
            log.warning("qa provider failed on %r for article %s: %s", question, doc.article.id, exc)
            return []
        raw_answers[question] = text
        raw_scores[question] = confidence
        if confidence >= retention_threshold and text:
            retained.append(QaAnswer(question=question, text=text, confidence=confidence))
    return retained
