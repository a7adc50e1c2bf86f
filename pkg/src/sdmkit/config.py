"""Project configuration: a flat ``key = value`` text file.

The format is a TOML-like subset (comments with ``#``, quoted strings,
ints, floats, booleans) parsed without any dependency.  Every knob of the
pipeline and service lives here; CLI flags override individual keys.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields, replace
from pathlib import Path


class ConfigError(ValueError):
    """A config file could not be parsed or violated a bound."""


@dataclass(frozen=True)
class ProjectConfig:
    paintings: Path = Path("paintings.jsonl")
    documents: Path = Path("documents.jsonl")
    lexicon: Path = Path("lexicon.tsv")
    stopwords: Path = Path("stopwords.txt")
    taxonomy: Path = Path("taxonomy.json")
    data_dir: Path = Path("build")
    provider: str = "baseline"
    dim: int = 256
    lam: float = 0.5
    top_n: int = 15
    k: int = 6
    seed: int = 42
    max_iter: int = 100
    tol: float = 1e-6
    tau: float = 0.3
    max_journals: int = 20
    min_docs: int = 5
    port: int = 8765
    sample: int = 0
    ratings: Path | None = None
    codings: Path | None = None
    frontend: Path | None = None

    def __post_init__(self):
        if not 0.0 <= self.lam <= 1.0:
            raise ConfigError("lambda must lie in [0, 1]")
        if self.top_n < 1 or self.k < 1 or self.max_iter < 1:
            raise ConfigError("top_n, k and max_iter must be positive")
        if self.dim < 1:
            raise ConfigError("dim must be positive")
        if self.tol < 0:
            raise ConfigError("tol must be non-negative")
        if self.max_journals < 1 or self.min_docs < 1:
            raise ConfigError("max_journals and min_docs must be positive")
        if self.sample < 0:
            raise ConfigError("sample must be >= 0")

    @property
    def ratings_path(self) -> Path:
        return self.ratings if self.ratings is not None else self.data_dir / "ratings.csv"

    def validate_paths(self) -> None:
        """Check that every referenced input file exists."""
        for name in ("paintings", "documents", "lexicon", "stopwords", "taxonomy"):
            path = getattr(self, name)
            if not Path(path).exists():
                raise ConfigError(f"configured {name} path does not exist: {path}")


_PATH_KEYS = {"paintings", "documents", "lexicon", "stopwords", "taxonomy",
              "data_dir", "ratings", "codings", "frontend"}
_KEY_ALIASES = {"lambda": "lam", "min_docs_per_journal": "min_docs"}


def _parse_scalar(raw: str, lineno: int):
    raw = raw.strip()
    if len(raw) >= 2 and raw[0] == raw[-1] and raw[0] in "\"'":
        return raw[1:-1]
    if raw.lower() in ("true", "false"):
        return raw.lower() == "true"
    try:
        return int(raw)
    except ValueError:
        pass
    try:
        return float(raw)
    except ValueError:
        pass
    if not raw:
        raise ConfigError(f"line {lineno}: empty value")
    return raw


def load_config(path, overrides: dict | None = None) -> ProjectConfig:
    """Parse a project file; relative paths resolve against its directory."""
    base = Path(path).resolve().parent
    known = {f.name: f for f in fields(ProjectConfig)}
    values: dict = {}
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}: line {lineno}: expected 'key = value'")
            key, _, raw = line.partition("=")
            key = _KEY_ALIASES.get(key.strip(), key.strip())
            if key not in known:
                raise ConfigError(f"{path}: line {lineno}: unknown key {key!r}")
            value = _parse_scalar(raw, lineno)
            if key in _PATH_KEYS:
                value = base / str(value)
            values[key] = value
    if overrides:
        for key, value in overrides.items():
            if value is not None:
                values[_KEY_ALIASES.get(key, key)] = value
    try:
        return ProjectConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def with_overrides(config: ProjectConfig, **overrides) -> ProjectConfig:
    updates = {k: v for k, v in overrides.items() if v is not None}
    return replace(config, **updates) if updates else config
