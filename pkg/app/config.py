import json
import os
from pathlib import Path
from typing import Any, Dict, List, Optional

import yaml
from pydantic import BaseModel, BaseSettings, Extra, Field, validator

from app.models.errors import ConfigError
from app.models.run import Subcommand
from app.models.token import Placement, Scheme
from app.models.vocab import DEFAULT_RESERVED

DATA_DIR = Path(__file__).resolve().parent / "data"


class Settings(BaseSettings):
    """Process-wide defaults; overridden by a config file, then by flags."""

    table_path: Path = DATA_DIR / "conjugation_rules.tsv"
    lemma_endings_path: Path = DATA_DIR / "lemma_endings.tsv"
    form_groups_path: Path = DATA_DIR / "form_groups.tsv"
    tag_map_path: Path = DATA_DIR / "ascii_tags.tsv"
    lexicon_path: Optional[Path] = None
    threads: int = Field(default_factory=lambda: os.cpu_count() or 1, ge=1)
    batch_size: int = Field(1000, ge=1)
    log_level: str = "INFO"
    database_url: str = "sqlite:///./katsuyo_runs.db"
    record_runs: bool = False

    class Config:
        env_prefix = "KATSUYO_"


settings = Settings()


def scheme_for(scheme: Scheme, placement: Optional[Placement]) -> Scheme:
    """A placement turns any POS scheme into the matching pos-* scheme."""
    if placement is None:
        return scheme
    if scheme.placement is None:
        raise ConfigError(f"placement needs a POS scheme, got {scheme.value}")
    return Scheme.for_placement(placement)


class PipelineConfig(BaseModel):
    """Resolved configuration of one CLI run."""

    subcommand: Subcommand
    scheme: Scheme = Scheme.conj_token
    placement: Optional[Placement] = None
    table: Path = settings.table_path
    lemma_endings: Path = settings.lemma_endings_path
    form_groups: Path = settings.form_groups_path
    lexicon: Optional[Path] = settings.lexicon_path
    merges: Optional[Path] = None
    num_merges: int = Field(2000, ge=1)
    vocab_size: int = Field(30000, ge=1)
    vocab_file: Optional[Path] = None
    reserved: List[str] = list(DEFAULT_RESERVED)
    tag_map: Optional[Path] = None
    threads: int = Field(settings.threads, ge=1)
    batch_size: int = Field(settings.batch_size, ge=1)
    input: Optional[Path] = None
    output: Optional[Path] = None
    report: Optional[Path] = None
    threshold: float = Field(1.0, ge=0.0, le=1.0)
    side: str = "mono"
    max_length: Optional[int] = Field(None, ge=1)
    lemma: Optional[str] = None
    conj_type: Optional[str] = None
    conj_form: Optional[str] = None
    record: bool = settings.record_runs
    log_level: str = settings.log_level

    class Config:
        extra = Extra.forbid

    @validator("side")
    def side_is_known(cls, value: str) -> str:
        if value not in ("mono", "ja", "en", "both"):
            raise ValueError(f"unknown side {value!r}")
        return value

    @validator("log_level")
    def log_level_is_known(cls, value: str) -> str:
        if value.upper() not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            raise ValueError(f"unknown log level {value!r}")
        return value.upper()

    @classmethod
    def resolve(cls, subcommand: Subcommand, flags: Dict[str, Any],
                config_file: Optional[Path] = None) -> "PipelineConfig":
        """Merge defaults < config file < flags and validate for the subcommand."""
        merged: Dict[str, Any] = {}
        if config_file is not None:
            merged.update(load_config_file(config_file))
        merged.update({k: v for k, v in flags.items() if v is not None})
        merged["subcommand"] = subcommand
        if merged.pop("ascii_tags", False) and not merged.get("tag_map"):
            merged["tag_map"] = settings.tag_map_path

        try:
            if merged.get("placement") is not None:
                merged["scheme"] = scheme_for(Scheme(merged.get("scheme", Scheme.conj_token)),
                                              Placement(merged["placement"]))
            config = cls(**merged)
        except ConfigError:
            raise
        except ValueError as e:
            raise ConfigError(str(e)) from e
        config.validate_for(subcommand)
        return config

    def validate_for(self, subcommand: Subcommand) -> None:
        for name in ("input", "table", "lemma_endings", "form_groups", "lexicon",
                     "tag_map", "vocab_file"):
            path = getattr(self, name)
            if path is not None and not Path(path).is_file():
                raise ConfigError(f"--{name.replace('_', '-')} {path} is not a readable file")

        if subcommand == Subcommand.decode and self.scheme.is_token_scheme and self.lexicon is None:
            raise ConfigError(f"decode with scheme {self.scheme.value} needs --lexicon")
        if subcommand == Subcommand.decode and not (self.scheme.is_token_scheme
                                                    or self.scheme == Scheme.baseline):
            raise ConfigError("conj-feature factors are source-side only and cannot be decoded")
        if subcommand == Subcommand.bpe_learn and self.merges is None:
            raise ConfigError("bpe-learn needs --merges to write the merge file to")
        if subcommand == Subcommand.bpe_apply:
            if self.merges is None or not Path(self.merges).is_file():
                raise ConfigError("bpe-apply needs an existing --merges file")
        if subcommand == Subcommand.coverage and self.vocab_file is None:
            raise ConfigError("coverage needs --vocab-file")
        if subcommand in (Subcommand.vocab, Subcommand.coverage, Subcommand.compare):
            if self.vocab_size <= len(self.reserved):
                raise ConfigError("--vocab-size must exceed the number of reserved symbols")
        if subcommand == Subcommand.inflect and (self.lemma is None or self.conj_type is None):
            raise ConfigError("inflect needs --lemma and --conj-type")

    def to_log_dict(self) -> Dict[str, Any]:
        return json.loads(self.json())


def load_config_file(path: Path) -> Dict[str, Any]:
    try:
        with open(path, encoding="utf-8") as f:
            data = yaml.safe_load(f) or {}
    except (OSError, yaml.YAMLError) as e:
        raise ConfigError(f"cannot read config file {path}: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must hold a mapping")
    return {str(k).replace("-", "_"): v for k, v in data.items()}
