from typing import Dict, List, Tuple

from pydantic import BaseModel, Field


class DecodeReport(BaseModel):
    """Counts of every restoration rule taken while decoding."""

    sentences: int = 0
    conj_applied: int = 0
    plain_fallback: int = 0
    orphan_conj_deleted: int = 0
    extra_conj_deleted: int = 0
    pos_deleted: int = 0
    misplaced_pos_deleted: int = 0
    unexpected_pos_deleted: int = 0
    applied_forms: Dict[str, int] = {}
    fallback_forms: Dict[str, int] = {}

    def merge(self, other: "DecodeReport") -> "DecodeReport":
        merged = self.copy(deep=True)
        for name in ("sentences", "conj_applied", "plain_fallback", "orphan_conj_deleted",
                     "extra_conj_deleted", "pos_deleted", "misplaced_pos_deleted",
                     "unexpected_pos_deleted"):
            setattr(merged, name, getattr(self, name) + getattr(other, name))
        for name in ("applied_forms", "fallback_forms"):
            counts = dict(getattr(self, name))
            for form, count in getattr(other, name).items():
                counts[form] = counts.get(form, 0) + count
            setattr(merged, name, counts)
        return merged

    @property
    def fallbacks(self) -> int:
        return (self.plain_fallback + self.orphan_conj_deleted + self.extra_conj_deleted
                + self.misplaced_pos_deleted + self.unexpected_pos_deleted)


class TypeCoverage(BaseModel):
    conj_type: str
    checked: int = 0
    restored: int = 0

    @property
    def fraction(self) -> float:
        return self.restored / self.checked if self.checked else 1.0


class RoundtripReport(BaseModel):
    """Corpus-wide restoration audit."""

    predicates: int = 0
    predicates_restored: int = 0
    by_type: Dict[str, TypeCoverage] = {}
    missing_pairs: List[Tuple[str, str]] = []
    sentences: int = 0
    sentences_restored: Dict[str, int] = {}
    threshold: float = Field(1.0, ge=0.0, le=1.0)

    @property
    def inflection_accuracy(self) -> float:
        return self.predicates_restored / self.predicates if self.predicates else 1.0

    def sentence_accuracy(self, scheme: str) -> float:
        if not self.sentences:
            return 1.0
        return self.sentences_restored.get(scheme, 0) / self.sentences

    @property
    def passed(self) -> bool:
        accuracies = [self.inflection_accuracy]
        accuracies += [self.sentence_accuracy(s) for s in self.sentences_restored]
        return min(accuracies) >= self.threshold


def flatten_metrics(values: Dict, prefix: str = "") -> Dict[str, object]:
    """Nested report dicts -> one `key=value` metric per line."""
    flat: Dict[str, object] = {}
    for key, value in values.items():
        name = f"{prefix}.{key}" if prefix else str(key)
        if isinstance(value, dict):
            flat.update(flatten_metrics(value, name))
        elif isinstance(value, (list, tuple)):
            flat[name] = ";".join(",".join(v) if isinstance(v, (list, tuple)) else str(v)
                                  for v in value)
        else:
            flat[name] = value.value if hasattr(value, "value") else value
    return flat
