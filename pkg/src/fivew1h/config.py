"""Run configuration: one JSON file holds every numeric knob and path.

Flags may override individual values, but archiving the config file is
enough to reproduce a run. Credentials never live here; the remote
provider and baseline client read tokens from the environment.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .annotate import (
    AnnotationProvider,
    FileProvider,
    HeuristicProvider,
    RemoteProvider,
    annotate,
    load_qa_prompts,
    load_temporal_patterns,
)
from .baseline import ExampleArticle
from .document import QUESTIONS, AnnotatedDocument, RawArticle
from .pipeline import (
    DATA_DIR,
    DEFAULT_POSITION_DENOMINATORS,
    PipelineOptions,
    PipelineResources,
    default_resources,
)
from .score import DEFAULT_WEIGHTS, ScoringError, validate_weights
from .selection import Thresholds

PROVIDER_KINDS = ("heuristic", "file", "remote")


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    provider_kind: str = "heuristic"
    endpoint: str | None = None
    annotations_dir: str | None = None
    timeout_s: float = 30.0
    retries: int = 2

    data_dir: str | None = None
    gazetteer_path: str | None = None
    temporal_patterns_path: str | None = None

    weights: dict[str, dict[str, float]] = field(default_factory=lambda: {q: dict(DEFAULT_WEIGHTS[q]) for q in QUESTIONS})
    thresholds: dict[str, float] = field(default_factory=lambda: {q: 0.5 for q in QUESTIONS})
    dedup_threshold: float = 0.5
    similarity_threshold: float | None = None
    containment_direction: str = "enclosing"
    position_denominators: dict[str, str] = field(default_factory=lambda: dict(DEFAULT_POSITION_DENOMINATORS))

    qa_prompts_path: str | None = None
    qa_retention_threshold: float = 0.5

    baseline_endpoint: str | None = None
    baseline_model: str | None = None
    baseline_cache_dir: str | None = None
    baseline_example_path: str | None = None

    output_dir: str = "out"
    jobs: int = 1

    def validate(self) -> None:
        if self.provider_kind not in PROVIDER_KINDS:
            raise ConfigError(f"provider must be one of {PROVIDER_KINDS}, got {self.provider_kind!r}")
        if self.provider_kind == "remote" and not self.endpoint:
            raise ConfigError("remote provider requires an endpoint")
        if self.provider_kind == "file" and not self.annotations_dir:
            raise ConfigError("file provider requires annotations_dir")
        try:
            validate_weights(self.weights)
        except ScoringError as exc:
            raise ConfigError(str(exc)) from exc
        for question, tau in self.thresholds.items():
            if question not in QUESTIONS or not (0.0 <= tau <= 1.0):
                raise ConfigError(f"bad threshold {question}={tau}")
        if not (0.0 <= self.dedup_threshold <= 1.0):
            raise ConfigError(f"dedup_threshold must be in [0,1], got {self.dedup_threshold}")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")


def load_config(path: str | Path | None) -> RunConfig:
    config = RunConfig()
    if path is not None:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        provider = raw.get("provider", {})
        config.provider_kind = provider.get("kind", config.provider_kind)
        config.endpoint = provider.get("endpoint", config.endpoint)
        config.annotations_dir = provider.get("annotations_dir", config.annotations_dir)
        config.timeout_s = provider.get("timeout_s", config.timeout_s)
        config.retries = provider.get("retries", config.retries)

        resources = raw.get("resources", {})
        config.data_dir = resources.get("data_dir", config.data_dir)
        config.gazetteer_path = resources.get("gazetteer", config.gazetteer_path)
        config.temporal_patterns_path = resources.get("temporal_patterns", config.temporal_patterns_path)

        for question, table in raw.get("weights", {}).items():
            config.weights[question] = dict(table)
        config.thresholds.update(raw.get("thresholds", {}))
        config.dedup_threshold = raw.get("dedup_threshold", config.dedup_threshold)
        config.similarity_threshold = raw.get("similarity_threshold", config.similarity_threshold)
        config.containment_direction = raw.get("containment_direction", config.containment_direction)
        config.position_denominators.update(raw.get("position_denominators", {}))

        qa = raw.get("qa", {})
        config.qa_prompts_path = qa.get("prompts", config.qa_prompts_path)
        config.qa_retention_threshold = qa.get("retention_threshold", config.qa_retention_threshold)

        baseline = raw.get("baseline", {})
        config.baseline_endpoint = baseline.get("endpoint", config.baseline_endpoint)
        config.baseline_model = baseline.get("model", config.baseline_model)
        config.baseline_cache_dir = baseline.get("cache_dir", config.baseline_cache_dir)
        config.baseline_example_path = baseline.get("example", config.baseline_example_path)

        config.output_dir = raw.get("output_dir", config.output_dir)
        config.jobs = raw.get("jobs", config.jobs)
    config.validate()
    return config


def make_resources(config: RunConfig) -> PipelineResources:
    resources = default_resources(config.data_dir)
    if config.gazetteer_path:
        from .resources import load_gazetteer

        resources.gazetteer = load_gazetteer(config.gazetteer_path)
    return resources


def make_options(config: RunConfig) -> PipelineOptions:
    return PipelineOptions(
        weights=config.weights,
        thresholds=Thresholds(by_question=dict(config.thresholds)),
        dedup_threshold=config.dedup_threshold,
        similarity_threshold=config.similarity_threshold,
        position_denominators=config.position_denominators,
        containment_direction=config.containment_direction,
    )


def make_providers(config: RunConfig, resources: PipelineResources) -> list[AnnotationProvider]:
    if config.provider_kind == "heuristic":
        return [HeuristicProvider(gazetteer=resources.gazetteer,
                                  data_dir=config.data_dir or DATA_DIR)]
    if config.provider_kind == "file":
        # Heuristic fallback keeps partially annotated files usable.
        return [FileProvider(config.annotations_dir),
                HeuristicProvider(gazetteer=resources.gazetteer, data_dir=config.data_dir or DATA_DIR)]
    provider = RemoteProvider(config.endpoint, timeout_s=config.timeout_s, retries=config.retries)
    return [provider]


def make_annotate_fn(config: RunConfig, resources: PipelineResources):
    providers = make_providers(config, resources)
    prompts = load_qa_prompts(config.qa_prompts_path) if any(
        "qa" in p.capabilities for p in providers) else None
    patterns = (load_temporal_patterns(config.temporal_patterns_path)
                if config.temporal_patterns_path else None)

    def annotate_fn(article: RawArticle) -> AnnotatedDocument:
        return annotate(article, providers, qa_prompts=prompts,
                        qa_retention_threshold=config.qa_retention_threshold,
                        temporal_patterns=patterns)

    return annotate_fn


def load_baseline_example(path: str | Path) -> ExampleArticle:
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    article = raw["article"]
    return ExampleArticle(
        article=RawArticle(id=article["id"], title=article["title"], body=article["body"],
                           outlet=article.get("outlet")),
        answers={q: list(raw["answers"].get(q, [])) for q in QUESTIONS},
    )
