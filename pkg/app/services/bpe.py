import heapq
import logging
from collections import Counter, defaultdict
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Set, Tuple

from app.models.errors import EmptyCorpus, MergeFileError
from app.models.merge import CONTINUATION, END_OF_WORD, MergeTable

logger = logging.getLogger(__name__)

Pair = Tuple[str, str]
SIDES = ("mono", "ja", "en", "both")
SIDE_COLUMNS = {"ja": (0,), "en": (1,), "both": (0, 1)}
ESCAPE = "\\"


def split_word(word: str, end_of_word: str = END_OF_WORD) -> Tuple[str, ...]:
    return tuple(word[:-1]) + (word[-1] + end_of_word,)


def escape_word(word: str, continuation: str = CONTINUATION) -> str:
    """Words ending in the marker or in `\\` get one more `\\`; no final subword ends in the marker."""
    if word.endswith((continuation, ESCAPE)):
        return word + ESCAPE
    return word


def unescape_word(word: str, continuation: str = CONTINUATION) -> str:
    if word.endswith(ESCAPE) and word[:-1].endswith((continuation, ESCAPE)):
        return word[:-1]
    return word


def _merge_symbols(symbols: Tuple[str, ...], pair: Pair) -> Tuple[str, ...]:
    left, right = pair
    merged: List[str] = []
    i = 0
    while i < len(symbols):
        if i + 1 < len(symbols) and symbols[i] == left and symbols[i + 1] == right:
            merged.append(left + right)
            i += 2
        else:
            merged.append(symbols[i])
            i += 1
    return tuple(merged)


def learn_bpe(word_counts: Dict[str, int], num_merges: int,
              end_of_word: str = END_OF_WORD, continuation: str = CONTINUATION) -> MergeTable:
    """
    Greedy BPE: repeatedly merge the most frequent adjacent symbol pair.

    Ties go to the lexicographically smallest (left, right). Learning stops
    after `num_merges` merges or once no pair occurs at least twice.
    """
    if num_merges < 1:
        raise ValueError("num_merges must be positive")
    vocab = [(split_word(escape_word(word, continuation), end_of_word), count)
             for word, count in sorted(word_counts.items()) if word and count > 0]
    if not vocab:
        raise EmptyCorpus("no words to learn merges from")

    stats: Counter = Counter()
    index: Dict[Pair, Set[int]] = defaultdict(set)
    for i, (symbols, freq) in enumerate(vocab):
        for pair in zip(symbols, symbols[1:]):
            stats[pair] += freq
            index[pair].add(i)
    heap = [(-count, pair) for pair, count in stats.items()]
    heapq.heapify(heap)

    merges: List[Pair] = []
    while len(merges) < num_merges and heap:
        neg_count, pair = heapq.heappop(heap)
        if stats.get(pair, 0) != -neg_count:
            continue  # stale
        if -neg_count < 2:
            break
        merges.append(pair)

        touched: Set[Pair] = set()
        for i in sorted(index.pop(pair)):
            symbols, freq = vocab[i]
            new = _merge_symbols(symbols, pair)
            if new == symbols:
                continue
            for old in zip(symbols, symbols[1:]):
                stats[old] -= freq
                touched.add(old)
            for fresh in zip(new, new[1:]):
                stats[fresh] += freq
                index[fresh].add(i)
                touched.add(fresh)
            vocab[i] = (new, freq)
        for p in touched:
            if stats[p] > 0:
                heapq.heappush(heap, (-stats[p], p))
            else:
                del stats[p]

    if len(merges) < num_merges:
        logger.info("stopped after %d of %d merges: no pair occurs twice", len(merges), num_merges)
    return MergeTable(merges=merges, continuation=continuation, end_of_word=end_of_word)


def apply_bpe(word: str, merges: MergeTable) -> List[str]:
    """Segment one word; non-final subwords carry the continuation marker."""
    if not word:
        return []
    cached = merges._cache.get(word)
    if cached is None:
        symbols = split_word(escape_word(word, merges.continuation), merges.end_of_word)
        last = -1
        while len(symbols) > 1:
            # only ranks above the last applied one, as in learning order
            ranked = [(merges.rank(p), p) for p in zip(symbols, symbols[1:])]
            ranked = [(r, p) for r, p in ranked if r is not None and r > last]
            if not ranked:
                break
            last, best = min(ranked)
            symbols = _merge_symbols(symbols, best)
        final = symbols[-1][:-len(merges.end_of_word)]
        cached = tuple(s + merges.continuation for s in symbols[:-1]) + (final,)
        merges._cache[word] = cached
    return list(cached)


def apply_sentence(line: str, merges: MergeTable) -> str:
    return " ".join(sub for word in line.split(" ") if word for sub in apply_bpe(word, merges))


def bpe_decode(subwords: Iterable[str], continuation: str = CONTINUATION) -> List[str]:
    words: List[str] = []
    pending = ""
    for sub in subwords:
        if sub.endswith(continuation):
            pending += sub[:-len(continuation)]
        else:
            words.append(unescape_word(pending + sub, continuation))
            pending = ""
    if pending:
        logger.debug("dangling continuation marker at sentence end: %s", pending)
        words.append(unescape_word(pending, continuation))
    return words


def decode_sentence(line: str, continuation: str = CONTINUATION) -> str:
    return " ".join(bpe_decode((s for s in line.split(" ") if s), continuation))


# --- PARALLEL SIDES ---
def side_segments(line: str, side: str) -> List[str]:
    """Text of the selected column(s) of a `ja<TAB>en` line; mono is the whole line."""
    line = line.rstrip("\r\n")
    if side == "mono":
        return [line]
    columns = line.split("\t")
    return [columns[c] for c in SIDE_COLUMNS[side] if c < len(columns)]


def word_counts(lines: Iterable[str], side: str = "mono") -> Dict[str, int]:
    counts: Counter = Counter()
    for line in lines:
        for segment in side_segments(line, side):
            counts.update(w for w in segment.split(" ") if w)
    return dict(counts)


def map_sides(line: str, side: str, fn) -> str:
    """Apply `fn` to the selected column(s), leaving the others untouched."""
    line = line.rstrip("\r\n")
    if side == "mono":
        return fn(line)
    columns = line.split("\t")
    for c in SIDE_COLUMNS[side]:
        if c < len(columns):
            columns[c] = fn(columns[c])
    return "\t".join(columns)


# --- MERGE FILES / SYMBOLS ---
def symbol_vocabulary(table: MergeTable, alphabet: Iterable[str],
                      k: Optional[int] = None) -> Set[str]:
    """Initial symbols plus the products of the first `k` merges."""
    symbols = set(alphabet)
    symbols.update(left + right for left, right in table.merges[:k])
    return symbols


def initial_alphabet(words: Iterable[str], end_of_word: str = END_OF_WORD,
                     continuation: str = CONTINUATION) -> Set[str]:
    alphabet: Set[str] = set()
    for word in words:
        if word:
            alphabet.update(split_word(escape_word(word, continuation), end_of_word))
    return alphabet


def write_merges(table: MergeTable, path: Path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(table.header() + "\n")
        for left, right in table.merges:
            f.write(f"{left} {right}\n")


def read_merges(lines: Iterable[str]) -> MergeTable:
    lines = iter(lines)
    header = next(lines, "").rstrip("\r\n")
    if not header.startswith("#version:"):
        raise MergeFileError("merge file has no '#version:' header line")
    meta = dict(field.split("=", 1) for field in header.split()[2:] if "=" in field)

    merges: List[Pair] = []
    for lineno, line in enumerate(lines, start=2):
        line = line.rstrip("\r\n")
        if not line:
            continue
        parts = line.split(" ")
        if len(parts) != 2 or not all(parts):
            raise MergeFileError(f"merge file line {lineno}: expected 'left right', got {line!r}")
        merges.append((parts[0], parts[1]))
    try:
        return MergeTable(merges=merges,
                          continuation=meta.get("continuation", CONTINUATION),
                          end_of_word=meta.get("end_of_word", END_OF_WORD))
    except ValueError as e:
        raise MergeFileError(str(e).splitlines()[-1].strip()) from e


def load_merges(path: Path) -> MergeTable:
    with open(path, encoding="utf-8") as f:
        table = read_merges(f)
    logger.info("merge file %s: %d merges", path, len(table))
    return table
