"""Prompt templates, generation/judge prompt assembly and completion parsing."""

from __future__ import annotations

import re
import string
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Mapping, Optional, Union

from .core import (
    GecForgeError,
    GenerationRecord,
    PromptSpec,
    SentencePair,
    ValidationError,
    validate_pair,
)


class TemplateError(GecForgeError):
    pass


class ParseError(GecForgeError, ValueError):
    pass


PLACEHOLDERS = frozenset(
    {
        "subject",
        "subject_type",
        "category",
        "category_name",
        "grammar_type",
        "pattern",
        "steps",
        "wrong",
        "right",
        "criterion",
        "question",
    }
)

TEMPLATE_NAMES = ("generation", "judge_c1", "judge_c2", "judge_c3", "judge_c4")


@dataclass(frozen=True)
class Placeholder:
    name: str


@dataclass(frozen=True)
class PromptTemplate:
    """A template split into literal strings and ``Placeholder`` tokens."""

    name: str
    segments: tuple[Union[str, Placeholder], ...]

    @classmethod
    def parse(cls, name: str, text: str) -> "PromptTemplate":
        segments: list[Union[str, Placeholder]] = []
        try:
            parsed = list(string.Formatter().parse(text))
        except ValueError as exc:
            raise TemplateError(f"template {name!r}: {exc}") from exc
        for literal, field_name, spec, conversion in parsed:
            if literal and segments and isinstance(segments[-1], str):
                segments[-1] += literal
            elif literal:
                segments.append(literal)
            if field_name is None:
                continue
            if spec or conversion:
                raise TemplateError(f"template {name!r}: format specs are not supported in {{{field_name}}}")
            if field_name not in PLACEHOLDERS:
                raise TemplateError(f"template {name!r}: unknown placeholder {{{field_name}}}")
            segments.append(Placeholder(field_name))
        return cls(name, tuple(segments))

    @property
    def placeholders(self) -> frozenset[str]:
        return frozenset(s.name for s in self.segments if isinstance(s, Placeholder))

    def render(self, bindings: Mapping[str, Optional[str]]) -> str:
        out = []
        for seg in self.segments:
            if isinstance(seg, str):
                out.append(seg)
                continue
            value = bindings.get(seg.name)
            if value is None:
                raise TemplateError(f"template {self.name!r}: placeholder {{{seg.name}}} is unbound")
            out.append(str(value))
        return "".join(out)


def load_template(name: str, directory: Optional[Union[str, Path]] = None) -> PromptTemplate:
    """Load ``<name>.txt`` from ``directory`` or from the bundled defaults."""
    if directory is not None:
        path = Path(directory) / f"{name}.txt"
        if path.exists():
            return PromptTemplate.parse(name, path.read_text(encoding="utf-8"))
    text = (resources.files("gecforge") / "templates" / f"{name}.txt").read_text(encoding="utf-8")
    return PromptTemplate.parse(name, text)


def load_templates(directory: Optional[Union[str, Path]] = None) -> dict[str, PromptTemplate]:
    return {name: load_template(name, directory) for name in TEMPLATE_NAMES}


def reasoning_steps(spec: PromptSpec) -> str:
    target = f"{spec.category.description.lower()} error"
    if spec.pattern:
        target += f" built around the pattern {spec.pattern}"
    return "\n".join(
        [
            f"1. Write a subject noun phrase around \"{spec.subject}\" that fits the type {spec.subject_type.display}.",
            "2. Write a natural, fully correct sentence that starts with that noun phrase.",
            f"3. Introduce a single {target} to obtain the wrong sentence.",
            "4. Check that nothing else differs between the two sentences.",
        ]
    )


def spec_bindings(spec: PromptSpec) -> dict[str, Optional[str]]:
    grammar = spec.category.description
    if spec.pattern:
        grammar += f" ({spec.pattern})"
    return {
        "subject": spec.subject,
        "subject_type": spec.subject_type.display,
        "category": spec.category.label,
        "category_name": spec.category.description,
        "grammar_type": grammar,
        "pattern": spec.pattern,
        "steps": reasoning_steps(spec),
    }


def build_generation_prompt(spec: PromptSpec, template: Optional[PromptTemplate] = None) -> str:
    return (template or load_template("generation")).render(spec_bindings(spec))


DEFAULT_JUDGE_QUESTIONS = {
    1: "Does the wrong sentence contain a {category_name} ({category}) error?",
    2: "Is the {category} error the only difference between the two sentences, with every other word kept the same?",
    3: "Do both sentences begin with the same subject noun phrase, built on \"{subject}\"?",
    4: "Is the right sentence fully grammatical, and does it keep the meaning of the wrong sentence?",
}


def build_judge_prompt(record: GenerationRecord, criterion: int, template: Optional[PromptTemplate] = None,
                       question: Optional[str] = None) -> str:
    if not isinstance(criterion, int) or criterion not in DEFAULT_JUDGE_QUESTIONS:
        raise TemplateError(f"criterion must be 1..4, got {criterion!r}")
    if record.pair is None:
        raise TemplateError("record has no sentence pair")
    bindings = spec_bindings(record.spec)
    bindings.update(wrong=record.pair.wrong, right=record.pair.right, criterion=str(criterion))
    q = PromptTemplate.parse(f"question_c{criterion}", question or DEFAULT_JUDGE_QUESTIONS[criterion])
    bindings["question"] = q.render(bindings)
    return (template or load_template(f"judge_c{criterion}")).render(bindings)


_MARKER = re.compile(r"^\s*(?:[-*>]\s*)?(?:\*\*)?(Wrong|Right)\s*:(?:\*\*)?\s*(.*?)\s*$", re.IGNORECASE)


def parse_completion(raw: str) -> SentencePair:
    """Take the last ``Wrong:`` and last ``Right:`` lines of a completion."""
    found: dict[str, str] = {}
    for line in raw.splitlines():
        m = _MARKER.match(line)
        if m:
            found[m.group(1).lower()] = m.group(2)
    missing = [k for k in ("wrong", "right") if k not in found]
    if missing:
        raise ParseError(f"completion lacks a {' and '.join(missing)} line")
    pair = SentencePair(found["wrong"], found["right"])
    violations = validate_pair(pair)
    if violations:
        raise ValidationError(violations)
    return pair
