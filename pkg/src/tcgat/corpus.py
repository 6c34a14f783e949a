"""Reading, validating and summarizing temporal-causal token corpora.

The canonical on-disk format is JSONL, one sentence per line (UTF-8, LF):

    {"id": "s1",
     "tokens": ["The", "rain", "caused", "the", "floods"],
     "causal_tags": ["O", "C", "O", "O", "E"],
     "temporal": [[1, 4, "B"]]}

Causal tags are ``C`` (cause), ``E`` (effect) and ``O`` (outside).  Temporal
relations hold between token indices: ``B`` before, ``A`` after, ``S``
simultaneous, ``I`` include, ``N`` be-include.  Converse relations may be
omitted in input; parsing completes them, so a validated sentence always
satisfies ``(i, j, B) <=> (j, i, A)``, ``(i, j, I) <=> (j, i, N)`` and the
symmetry of ``S``.  The self-designating ``M`` state is never stored; it is
synthesized when attention masks are built.

Parsing and generation are pure functions over their inputs and safe to call
concurrently on disjoint files.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass

CAUSAL_TAGS = ("O", "C", "E")
RELATIONS = ("B", "A", "S", "I", "N")
CONVERSE = {"B": "A", "A": "B", "I": "N", "N": "I", "S": "S"}

DEFAULT_MAX_LEN = 50


class CorpusError(ValueError):
    """A corpus file or record violates the format contract."""

    def __init__(self, message, line_no=None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class OverLengthError(CorpusError):
    """A sentence exceeds the configured maximum token count."""


@dataclass
class AnnotatedSentence:
    """One validated corpus record with converse-closed temporal relations."""

    id: str
    tokens: list
    causal_tags: list
    temporal_relations: list  # sorted list of (i, j, rel) tuples, closed

    def __len__(self):
        return len(self.tokens)


@dataclass
class CorpusStats:
    """Exact counts over a list of validated sentences."""

    sentence_count: int
    tag_counts: dict
    relation_counts: dict
    split: str | None = None

    def __add__(self, other):
        if self.split == other.split:
            merged_split = self.split
        else:
            merged_split = None
        return CorpusStats(
            sentence_count=self.sentence_count + other.sentence_count,
            tag_counts={t: self.tag_counts[t] + other.tag_counts[t] for t in CAUSAL_TAGS},
            relation_counts={r: self.relation_counts[r] + other.relation_counts[r]
                             for r in RELATIONS},
            split=merged_split,
        )


def close_converses(relations, line_no=None):
    """Return the converse closure of ``relations`` as a sorted tuple list.

    Raises :class:`CorpusError` on duplicate ordered pairs or on pairs whose
    two directions contradict each other (e.g. ``(i, j, B)`` and
    ``(j, i, B)``).
    """
    by_pair = {}
    for rel in relations:
        i, j, r = rel
        if (i, j) in by_pair:
            if by_pair[(i, j)] != r:
                raise CorpusError(
                    f"contradictory relations for ordered pair ({i}, {j}): "
                    f"{by_pair[(i, j)]} vs {r}", line_no)
            raise CorpusError(f"duplicate relation for ordered pair ({i}, {j})", line_no)
        by_pair[(i, j)] = r
    closed = dict(by_pair)
    for (i, j), r in by_pair.items():
        want = CONVERSE[r]
        have = closed.get((j, i))
        if have is None:
            closed[(j, i)] = want
        elif have != want:
            raise CorpusError(
                f"contradictory relations: ({i}, {j}, {r}) implies ({j}, {i}, {want}) "
                f"but found ({j}, {i}, {have})", line_no)
    return sorted((i, j, r) for (i, j), r in closed.items())


def validate_record(record, max_len=DEFAULT_MAX_LEN, line_no=None):
    """Validate one decoded JSONL record into an :class:`AnnotatedSentence`.

    Over-length sentences are reported via ``CorpusError`` with the sentence
    id in the message so callers can aggregate them.
    """
    if not isinstance(record, dict):
        raise CorpusError("record is not a JSON object", line_no)
    for key in ("id", "tokens", "causal_tags", "temporal"):
        if key not in record:
            raise CorpusError(f"missing field {key!r}", line_no)
    sid = record["id"]
    if not isinstance(sid, str) or not sid:
        raise CorpusError("id must be a non-empty string", line_no)
    tokens = record["tokens"]
    if not isinstance(tokens, list) or not tokens:
        raise CorpusError(f"{sid}: tokens must be a non-empty list", line_no)
    if not all(isinstance(t, str) and t for t in tokens):
        raise CorpusError(f"{sid}: tokens must be non-empty strings", line_no)
    length = len(tokens)
    if length > max_len:
        raise OverLengthError(f"over-length sentence {sid}: {length} > {max_len}", line_no)
    tags = record["causal_tags"]
    if not isinstance(tags, list) or len(tags) != length:
        raise CorpusError(f"{sid}: causal_tags length != token length", line_no)
    for t in tags:
        if t not in CAUSAL_TAGS:
            raise CorpusError(f"{sid}: unknown causal tag {t!r}", line_no)
    raw = record["temporal"]
    if not isinstance(raw, list):
        raise CorpusError(f"{sid}: temporal must be a list", line_no)
    relations = []
    for entry in raw:
        if not isinstance(entry, (list, tuple)) or len(entry) != 3:
            raise CorpusError(f"{sid}: temporal entry must be [i, j, rel]", line_no)
        i, j, r = entry
        if not isinstance(i, int) or not isinstance(j, int) or isinstance(i, bool) or isinstance(j, bool):
            raise CorpusError(f"{sid}: temporal indices must be integers", line_no)
        if not (0 <= i < length) or not (0 <= j < length):
            raise CorpusError(f"{sid}: temporal index out of range: ({i}, {j})", line_no)
        if i == j:
            raise CorpusError(f"{sid}: self-relation at index {i}", line_no)
        if r not in RELATIONS:
            raise CorpusError(f"{sid}: unknown temporal relation {r!r}", line_no)
        relations.append((i, j, r))
    closed = close_converses(relations, line_no)
    return AnnotatedSentence(id=sid, tokens=list(tokens), causal_tags=list(tags),
                             temporal_relations=closed)


def parse_corpus(path, max_len=DEFAULT_MAX_LEN):
    """Parse a JSONL corpus file into validated sentences.

    Malformed records raise immediately with their line number.  Over-length
    sentences are collected and reported together in a single error listing
    their ids.  Duplicate sentence ids are rejected (external embedding files
    key vectors by id).
    """
    sentences = []
    over_length = []
    seen_ids = set()
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"malformed record: {exc.msg}", line_no) from exc
            try:
                sentence = validate_record(record, max_len=max_len, line_no=line_no)
            except OverLengthError:
                over_length.append(record.get("id", f"<line {line_no}>"))
                continue
            if sentence.id in seen_ids:
                raise CorpusError(f"duplicate sentence id {sentence.id!r}", line_no)
            seen_ids.add(sentence.id)
            sentences.append(sentence)
    if over_length:
        raise CorpusError(
            "over-length sentences rejected (max_len=%d): %s"
            % (max_len, ", ".join(over_length)))
    return sentences


def sentence_to_record(sentence):
    return {
        "id": sentence.id,
        "tokens": list(sentence.tokens),
        "causal_tags": list(sentence.causal_tags),
        "temporal": [[i, j, r] for (i, j, r) in sentence.temporal_relations],
    }


def dump_corpus(sentences, path):
    """Write sentences as canonical JSONL (UTF-8, LF line endings)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for s in sentences:
            fh.write(json.dumps(sentence_to_record(s), ensure_ascii=False))
            fh.write("\n")


def corpus_stats(sentences, split=None):
    """Exact tag and relation counts; additive over corpus concatenation."""
    if split not in (None, "train", "test"):
        raise ValueError(f"split must be 'train', 'test' or None, got {split!r}")
    tag_counts = {t: 0 for t in CAUSAL_TAGS}
    rel_counts = {r: 0 for r in RELATIONS}
    for s in sentences:
        for t in s.causal_tags:
            tag_counts[t] += 1
        for _, _, r in s.temporal_relations:
            rel_counts[r] += 1
    return CorpusStats(sentence_count=len(sentences), tag_counts=tag_counts,
                       relation_counts=rel_counts, split=split)


def split_corpus(sentences, seed, train_fraction=2 / 3):
    """Deterministic shuffled split, train first (default 2:1)."""
    order = list(sentences)
    random.Random(seed).shuffle(order)
    cut = int(round(len(order) * train_fraction))
    return order[:cut], order[cut:]
