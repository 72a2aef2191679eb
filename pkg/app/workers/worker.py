import logging
from itertools import islice
from multiprocessing import Pool
from typing import Callable, Iterable, Iterator, List, Optional, Tuple, TypeVar

from pydantic import BaseModel

from app.models.conjugation import ConjugationTable
from app.models.lexicon import LemmaLexicon
from app.models.merge import MergeTable
from app.models.morpheme import AnalyzedSentence
from app.models.report import DecodeReport
from app.models.token import Scheme, TagMap
from app.services.bpe import apply_sentence, decode_sentence, map_sides
from app.services.decode import decode_line
from app.services.encode import encode_sentence

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


class WorkerResources(BaseModel):
    """Read-only state every worker process gets once, at start-up."""

    scheme: Scheme = Scheme.conj_token
    schemes: List[Scheme] = []
    table: Optional[ConjugationTable] = None
    lexicon: Optional[LemmaLexicon] = None
    tag_map: Optional[TagMap] = None
    merges: Optional[MergeTable] = None
    side: str = "mono"


resources: Optional[WorkerResources] = None


def init_worker(shared: WorkerResources) -> None:
    global resources
    resources = shared


def encode_batch(batch: List[AnalyzedSentence]) -> List[str]:
    return [encode_sentence(s, resources.scheme, resources.tag_map) for s in batch]


def decode_batch(batch: List[str]) -> List[Tuple[str, DecodeReport]]:
    return [decode_line(line, resources.scheme, resources.table, resources.lexicon,
                        resources.tag_map) for line in batch]


def roundtrip_batch(batch: List[AnalyzedSentence]) -> List[Tuple[bool, ...]]:
    """decode(encode(s)) == s for each sentence, one flag per scheme in `resources.schemes`."""
    schemes = resources.schemes or [resources.scheme]
    restored = []
    for s in batch:
        flags = []
        for scheme in schemes:
            line = encode_sentence(s, scheme, resources.tag_map)
            text, _ = decode_line(line, scheme, resources.table, resources.lexicon,
                                  resources.tag_map)
            flags.append(text == " ".join(s.surfaces))
        restored.append(tuple(flags))
    return restored


def bpe_apply_batch(batch: List[str]) -> List[str]:
    return [map_sides(line, resources.side, lambda text: apply_sentence(text, resources.merges))
            for line in batch]


def bpe_decode_batch(batch: List[str]) -> List[str]:
    continuation = resources.merges.continuation if resources.merges else "@@"
    return [map_sides(line, resources.side, lambda text: decode_sentence(text, continuation))
            for line in batch]


def batched(items: Iterable[T], size: int) -> Iterator[List[T]]:
    it = iter(items)
    while True:
        batch = list(islice(it, size))
        if not batch:
            return
        yield batch


def run_ordered(fn: Callable[[List[T]], List[R]], items: Iterable[T], shared: WorkerResources,
                threads: int = 1, batch_size: int = 1000) -> Iterator[R]:
    """
    Map `fn` over batches of `items` and yield results in input order.

    With one thread everything runs in-process; otherwise a process pool is
    started with `shared` installed in every worker.
    """
    batches = batched(items, batch_size)
    if threads <= 1:
        init_worker(shared)
        for batch in batches:
            yield from fn(batch)
        return

    logger.debug("starting %d workers, batch size %d", threads, batch_size)
    with Pool(processes=threads, initializer=init_worker, initargs=(shared,)) as pool:
        for results in pool.imap(fn, batches):
            yield from results
