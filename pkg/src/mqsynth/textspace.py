"""The textual instance space: tokenized sentences and word-substitution operators.

Sentences are tokenized on whitespace with leading/trailing punctuation split
off, coarse-tagged from a lexicon (suffix rules as fallback), and perturbed by
operators that replace one noun/verb/adjective with a semantic neighbor whose
dominant tag matches. Every derived sentence carries a provenance record
(root id + operator chain) that replays to its exact text.
"""

import hashlib
from dataclasses import dataclass, field, replace

from .embeddings import EmbeddingTable, k_nearest

NOUN = "NOUN"
VERB = "VERB"
ADJ = "ADJ"
ADV = "ADV"
PRON = "PRON"
DET = "DET"
PREP = "PREP"
CONJ = "CONJ"
NUM = "NUM"
PUNCT = "PUNCT"
OTHER = "OTHER"

COARSE_TAGS = frozenset(
    {NOUN, VERB, ADJ, ADV, PRON, DET, PREP, CONJ, NUM, PUNCT, OTHER}
)

# Only nouns, verbs and adjectives are substitution targets.
REPLACEABLE_TAGS = frozenset({NOUN, VERB, ADJ})

PUNCT_CHARS = set(".,!?;:'\"()[]{}")
_NO_SPACE_BEFORE = {".", ",", "!", "?", ";", ":", "'", ")", "]", "}"}
_OPENERS = {"(", "[", "{"}


class LexiconError(ValueError):
    """Raised for malformed POS lexicon or suffix-rule files."""


@dataclass(frozen=True)
class Token:
    surface: str
    normalized: str
    pos: str = OTHER
    replaceable: bool = False


@dataclass(frozen=True)
class ModOp:
    """Replace the token at `position` with `replacement` (semantic distance given)."""

    position: int
    replacement: str
    distance: float


@dataclass(frozen=True)
class ProvenanceRecord:
    root_id: str
    root_label: int | None = None
    chain: tuple[ModOp, ...] = ()


@dataclass(frozen=True)
class SentenceInstance:
    tokens: tuple[Token, ...]
    raw_text: str
    id: str
    provenance: ProvenanceRecord

    @property
    def normalized_text(self) -> str:
        return self.raw_text.lower()

    def pos_sequence(self) -> tuple[str, ...]:
        return tuple(t.pos for t in self.tokens)


def tokenize(text: str) -> list[Token]:
    """Split on whitespace, then peel leading/trailing punctuation into PUNCT tokens.

    Internal punctuation (don't, well-known) stays inside the word. Word
    tokens keep their original casing in `surface`; `normalized` is the
    lowercased surface. Raises ValueError on empty/whitespace-only input.
    """
    if not text or not text.strip():
        raise ValueError("cannot tokenize empty or whitespace-only text")
    tokens: list[Token] = []
    for chunk in text.split():
        leading: list[str] = []
        trailing: list[str] = []
        core = chunk
        while core and core[0] in PUNCT_CHARS:
            leading.append(core[0])
            core = core[1:]
        while core and core[-1] in PUNCT_CHARS:
            trailing.append(core[-1])
            core = core[:-1]
        for ch in leading:
            tokens.append(Token(ch, ch, PUNCT))
        if core:
            tokens.append(Token(core, core.lower(), OTHER))
        for ch in reversed(trailing):
            tokens.append(Token(ch, ch, PUNCT))
    return tokens


def detokenize(tokens) -> str:
    """Join tokens with single spaces, gluing punctuation to its host word.

    No space before . , ! ? ; : ' and closing brackets; no space after an
    opening bracket or an opening double quote (straight quotes alternate
    open/close by order of appearance).
    """
    if not tokens:
        raise ValueError("cannot detokenize an empty token list")
    parts: list[str] = []
    glue_next = False
    quote_open = False
    for i, tok in enumerate(tokens):
        s = tok.surface
        is_quote = s == '"'
        if is_quote:
            quote_open = not quote_open
        if i == 0:
            parts.append(s)
        else:
            glue = glue_next or s in _NO_SPACE_BEFORE or (is_quote and not quote_open)
            parts.append(s if glue else " " + s)
        glue_next = s in _OPENERS or (is_quote and quote_open)
    return "".join(parts)


class PosLexicon:
    """Word -> ranked (tag, frequency) map plus ordered suffix fallback rules.

    Suffix rules are consulted only for words absent from the map; purely
    numeric words tag as NUM; everything else falls back to OTHER.
    """

    def __init__(
        self,
        entries: dict[str, list[tuple[str, float]]],
        suffix_rules: list[tuple[str, str]] | None = None,
    ):
        self.entries = {}
        for word, tags in entries.items():
            if not tags:
                raise LexiconError(f"no tags for word {word!r}")
            total = sum(f for _, f in tags)
            if abs(total - 1.0) > 1e-6:
                raise LexiconError(
                    f"tag frequencies for {word!r} sum to {total}, expected 1"
                )
            for tag, _ in tags:
                if tag not in COARSE_TAGS:
                    raise LexiconError(f"unknown tag {tag!r} for word {word!r}")
            ranked = sorted(tags, key=lambda tf: -tf[1])
            self.entries[word.lower()] = ranked
        self.suffix_rules = list(suffix_rules or [])
        for suffix, tag in self.suffix_rules:
            if tag not in COARSE_TAGS:
                raise LexiconError(f"unknown tag {tag!r} for suffix {suffix!r}")

    def __contains__(self, word: str) -> bool:
        return word.lower() in self.entries

    def dominant_tag(self, word: str) -> str | None:
        ranked = self.entries.get(word.lower())
        return ranked[0][0] if ranked else None

    def tag_word(self, word: str) -> str:
        dom = self.dominant_tag(word)
        if dom is not None:
            return dom
        norm = word.lower()
        if norm.replace(",", "").replace(".", "").isdigit():
            return NUM
        for suffix, tag in self.suffix_rules:
            if norm.endswith(suffix) and len(norm) > len(suffix):
                return tag
        return OTHER


def load_pos_lexicon(lexicon_path, suffix_path=None) -> PosLexicon:
    """Load `word TAB tag:freq[,tag:freq...]` records plus optional suffix rules.

    Suffix-rule files hold `suffix TAB tag` lines, highest priority first.
    """
    entries: dict[str, list[tuple[str, float]]] = {}
    with open(lexicon_path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            try:
                word, spec = line.split("\t")
                tags = []
                for item in spec.split(","):
                    tag, freq = item.split(":")
                    tags.append((tag.strip(), float(freq)))
            except ValueError as exc:
                raise LexiconError(f"{lexicon_path}:{lineno}: bad record: {exc}") from exc
            entries.setdefault(word.lower(), tags)
    rules: list[tuple[str, str]] = []
    if suffix_path is not None:
        with open(suffix_path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.rstrip("\n")
                if not line.strip() or line.startswith("#"):
                    continue
                try:
                    suffix, tag = line.split("\t")
                except ValueError as exc:
                    raise LexiconError(
                        f"{suffix_path}:{lineno}: bad record: {exc}"
                    ) from exc
                rules.append((suffix.strip().lstrip("-"), tag.strip()))
    return PosLexicon(entries, rules)


def tag_pos(tokens, lexicon: PosLexicon) -> list[Token]:
    """Assign each word token its most frequent lexicon tag (suffix/OTHER fallback)."""
    tagged = []
    for tok in tokens:
        if tok.pos == PUNCT:
            tagged.append(tok)
            continue
        tag = lexicon.tag_word(tok.normalized)
        tagged.append(replace(tok, pos=tag, replaceable=tag in REPLACEABLE_TAGS))
    return tagged


def _instance_id(payload: str) -> str:
    return hashlib.sha1(payload.encode("utf-8")).hexdigest()[:16]


def _derived_id(root_id: str, chain) -> str:
    parts = [root_id]
    parts.extend(f"{op.position}>{op.replacement}" for op in chain)
    return _instance_id("|".join(parts))


def make_instance(
    text: str, lexicon: PosLexicon, label: int | None = None
) -> SentenceInstance:
    """Build a root (core-set) instance: tokenize, tag, canonicalize spacing."""
    tokens = tuple(tag_pos(tokenize(text), lexicon))
    raw = detokenize(tokens)
    iid = _instance_id(f"root:{raw.lower()}")
    return SentenceInstance(
        tokens=tokens,
        raw_text=raw,
        id=iid,
        provenance=ProvenanceRecord(root_id=iid, root_label=label, chain=()),
    )


def candidate_operators(
    s: SentenceInstance, k: int, table: EmbeddingTable, lexicon: PosLexicon
) -> list[ModOp]:
    """All surviving substitution operators for `s`, ordered by (position, distance).

    For each replaceable in-vocabulary token, one candidate per k-nearest
    neighbor that (a) has the same dominant lexicon tag as the original,
    (b) is known to the lexicon at all, and (c) differs from the original
    word. Sentences can legitimately yield an empty list.
    """
    ops: list[ModOp] = []
    for pos, tok in enumerate(s.tokens):
        if not tok.replaceable or tok.normalized not in table:
            continue
        for word, dist in k_nearest(tok.normalized, k, table).neighbors:
            if word == tok.normalized:
                continue
            if lexicon.dominant_tag(word) != tok.pos:
                continue
            ops.append(ModOp(position=pos, replacement=word, distance=dist))
    return ops


def apply_op(s: SentenceInstance, op: ModOp) -> SentenceInstance:
    """Apply one substitution, copying capitalization and extending provenance."""
    if not 0 <= op.position < len(s.tokens):
        raise ValueError(
            f"operator position {op.position} out of range for {len(s.tokens)} tokens"
        )
    orig = s.tokens[op.position]
    norm = op.replacement.lower()
    if norm == orig.normalized:
        raise ValueError(f"replacement {op.replacement!r} equals the original word")
    surface = norm[0].upper() + norm[1:] if orig.surface[0].isupper() else norm
    new_tok = Token(surface, norm, orig.pos, orig.replaceable)
    tokens = s.tokens[: op.position] + (new_tok,) + s.tokens[op.position + 1 :]
    chain = s.provenance.chain + (op,)
    prov = ProvenanceRecord(
        root_id=s.provenance.root_id,
        root_label=s.provenance.root_label,
        chain=chain,
    )
    return SentenceInstance(
        tokens=tokens,
        raw_text=detokenize(tokens),
        id=_derived_id(prov.root_id, chain),
        provenance=prov,
    )


def replay_chain(root: SentenceInstance, chain) -> SentenceInstance:
    """Re-apply an operator chain to its root; witnesses closure membership."""
    inst = root
    for op in chain:
        inst = apply_op(inst, op)
    return inst


def chain_records(root: SentenceInstance, chain) -> list[dict]:
    """Chain as wire-format dicts, recovering the original word at each step."""
    records = []
    inst = root
    for op in chain:
        records.append(
            {
                "position": op.position,
                "original": inst.tokens[op.position].normalized,
                "replacement": op.replacement,
                "distance": op.distance,
            }
        )
        inst = apply_op(inst, op)
    return records
