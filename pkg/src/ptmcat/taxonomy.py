"""The SDLC-aligned SE task taxonomy that drives all matching."""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from importlib import resources
from pathlib import Path

from .textprep import Normalizer


class SeActivity(Enum):
    REQUIREMENTS_ENGINEERING = "requirements-engineering"
    SOFTWARE_DESIGN = "software-design"
    SOFTWARE_IMPLEMENTATION = "software-implementation"
    SOFTWARE_QUALITY_ASSURANCE = "software-quality-assurance"
    SOFTWARE_MAINTENANCE = "software-maintenance"

    @property
    def label(self) -> str:
        return self.value.replace("-", " ").title()

    @classmethod
    def parse(cls, name: str) -> "SeActivity":
        key = name.strip().lower().replace("_", " ").replace("-", " ")
        for activity in cls:
            if key == activity.value.replace("-", " "):
                return activity
        raise UnknownActivity(name)


@dataclass(frozen=True)
class SeTask:
    name: str
    activity: SeActivity
    prepared_phrase: tuple[str, ...] = ()

    def key(self) -> tuple[str, SeActivity]:
        return (self.name, self.activity)


@dataclass(frozen=True)
class Taxonomy:
    tasks: tuple[SeTask, ...]
    version: str
    source_note: str = ""

    def by_activity(self, activity: SeActivity) -> list[SeTask]:
        return [t for t in self.tasks if t.activity == activity]

    def find(self, name: str) -> SeTask | None:
        for t in self.tasks:
            if t.name == name:
                return t
        return None


class TaxonomyError(Exception):
    pass


class MissingFile(TaxonomyError):
    pass


class ParseError(TaxonomyError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class DuplicateTask(TaxonomyError):
    def __init__(self, name: str, activity: str):
        super().__init__(f"duplicate task ({name!r}, {activity})")
        self.name = name
        self.activity = activity


class UnknownActivity(TaxonomyError):
    def __init__(self, name: str):
        super().__init__(f"unknown activity {name!r}")
        self.name = name


class EmptyPhrase(TaxonomyError):
    def __init__(self, task: str):
        super().__init__(f"task {task!r} normalizes to zero tokens")
        self.task = task


def load_taxonomy(source: str | Path, normalizer: Normalizer | None = None) -> Taxonomy:
    """Load a `activity<TAB>task name` file and prepare all phrases.

    The file must carry a `version:` header line; `#` comments and blank
    lines are skipped. A `note:` header line, when present, becomes the
    taxonomy's source_note.
    """
    path = Path(source)
    if not path.is_file():
        raise MissingFile(str(path))
    return parse_taxonomy(path.read_text("utf-8"), normalizer=normalizer)


def parse_taxonomy(text: str, normalizer: Normalizer | None = None) -> Taxonomy:
    version = None
    source_note = ""
    rows: list[tuple[int, str, str]] = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if stripped.lower().startswith("version:"):
            version = stripped.split(":", 1)[1].strip()
            continue
        if stripped.lower().startswith("note:"):
            source_note = stripped.split(":", 1)[1].strip()
            continue
        if "\t" not in stripped:
            raise ParseError(line_no, "expected `activity<TAB>task name`")
        activity_name, task_name = stripped.split("\t", 1)
        task_name = task_name.strip()
        if not task_name:
            raise ParseError(line_no, "empty task name")
        rows.append((line_no, activity_name, task_name))
    if version is None:
        raise ParseError(0, "missing required `version:` header")

    tasks: list[SeTask] = []
    seen: set[tuple[str, SeActivity]] = set()
    for line_no, activity_name, task_name in rows:
        activity = SeActivity.parse(activity_name)
        key = (task_name, activity)
        if key in seen:
            raise DuplicateTask(task_name, activity.label)
        seen.add(key)
        tasks.append(SeTask(name=task_name, activity=activity))

    taxonomy = Taxonomy(tasks=tuple(tasks), version=version, source_note=source_note)
    return prepare_phrases(taxonomy, normalizer or Normalizer())


def prepare_phrases(taxonomy: Taxonomy, normalizer: Normalizer) -> Taxonomy:
    """Recompute every task's lemma phrase with `normalizer`. Idempotent."""
    prepared = []
    for task in taxonomy.tasks:
        lemmas = normalizer.lemma_sequence(task.name)
        if not lemmas:
            raise EmptyPhrase(task.name)
        prepared.append(replace(task, prepared_phrase=lemmas))
    return replace(taxonomy, tasks=tuple(prepared))


def save_taxonomy(taxonomy: Taxonomy, path: str | Path) -> None:
    lines = [f"version: {taxonomy.version}"]
    if taxonomy.source_note:
        lines.append(f"note: {taxonomy.source_note}")
    for task in taxonomy.tasks:
        lines.append(f"{task.activity.label}\t{task.name}")
    Path(path).write_text("\n".join(lines) + "\n", "utf-8")


def default_taxonomy_path() -> Path:
    return Path(str(resources.files("ptmcat.data").joinpath("taxonomy.tsv")))


def load_default_taxonomy(normalizer: Normalizer | None = None) -> Taxonomy:
    return load_taxonomy(default_taxonomy_path(), normalizer=normalizer)
