"""Token vocabulary with reserved ids and per-instance copy extensions."""

from __future__ import annotations

from collections import Counter

PAD = "<pad>"
UNK = "<unk>"
BOS = "<bos>"
EOS = "<eos>"
SEP = "<sep>"
SPECIALS = (PAD, UNK, BOS, EOS, SEP)

PAD_ID, UNK_ID, BOS_ID, EOS_ID, SEP_ID = range(5)


class Vocab:
    """Dense token ↔ id maps; ids 0..4 are the special tokens above, then the
    reserved tokens handed to the constructor (slot placeholders and the
    belief-span separator), then corpus tokens by descending frequency."""

    def __init__(self, tokens: list[str]):
        self.id_to_token = list(tokens)
        self.token_to_id = {t: i for i, t in enumerate(self.id_to_token)}
        if len(self.token_to_id) != len(self.id_to_token):
            raise ValueError("duplicate token in vocabulary")
        if tuple(self.id_to_token[:5]) != SPECIALS:
            raise ValueError(f"vocabulary must start with the special tokens {SPECIALS}")

    def __len__(self) -> int:
        return len(self.id_to_token)

    def __contains__(self, token: str) -> bool:
        return token in self.token_to_id

    def id(self, token: str) -> int:
        return self.token_to_id.get(token, UNK_ID)

    def token(self, i: int) -> str:
        return self.id_to_token[i]

    @classmethod
    def build(cls, sequences, reserved: list[str] = ()) -> "Vocab":
        """Vocabulary from an iterable of token sequences (the training split only)."""
        counts = Counter()
        for seq in sequences:
            counts.update(seq)
        tokens = list(SPECIALS)
        seen = set(tokens)
        for t in reserved:
            if t not in seen:
                tokens.append(t)
                seen.add(t)
        for t, _n in sorted(counts.items(), key=lambda kv: (-kv[1], kv[0])):
            if t not in seen:
                tokens.append(t)
                seen.add(t)
        return cls(tokens)


class CopyExtension:
    """Per-instance extended ids for source tokens outside the vocabulary.

    Extended ids continue after the base vocabulary so a copy distribution over
    source positions and the vocabulary distribution share one index space.
    """

    def __init__(self, vocab: Vocab, source_tokens: list[str]):
        self.vocab = vocab
        self.ext_to_token: list[str] = []
        self._ext_ids: dict[str, int] = {}
        for t in source_tokens:
            if t not in vocab and t not in self._ext_ids:
                self._ext_ids[t] = len(vocab) + len(self.ext_to_token)
                self.ext_to_token.append(t)

    @property
    def width(self) -> int:
        return len(self.vocab) + len(self.ext_to_token)

    def source_id(self, token: str) -> int:
        """Id a source token occupies in the extended space (never UNK for known sources)."""
        if token in self.vocab:
            return self.vocab.id(token)
        return self._ext_ids[token]

    def target_id(self, token: str) -> int:
        """Id a supervision token maps to: vocab id, else extended id, else UNK."""
        if token in self.vocab:
            return self.vocab.id(token)
        return self._ext_ids.get(token, UNK_ID)

    def token(self, i: int) -> str:
        if i < len(self.vocab):
            return self.vocab.token(i)
        return self.ext_to_token[i - len(self.vocab)]
