"""Language models for perplexity scoring.

Two backends sit behind one registry: any Hugging Face causal LM id
(e.g. ``gpt2``) when the weights are locally available, and
``bigram-en-v1``, a self-contained interpolated bigram model trained at
import time on an embedded corpus. Both expose mean_nll(text); perplexity is
exp of that value.
"""

from __future__ import annotations

import hashlib
import math
import re
from collections import Counter

from ._corpus import CORPUS_TEXT

BUILTIN_MODEL_ID = "bigram-en-v1"

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


class ModelUnavailableError(RuntimeError):
    """The requested model cannot be loaded in this environment."""


def word_tokens(text: str) -> list[str]:
    return _TOKEN_RE.findall(text.casefold())


class BigramLM:
    """Interpolated bigram model over the embedded corpus.

    P(w | prev) = l2 * P_ml(w | prev) + l1 * P_ml(w) + l0 / (V + 1), with an
    unknown-word bucket. Sentences are scored left to right from a start
    symbol, so word order moves the score while the unigram and uniform
    terms do not.
    """

    START = "<s>"
    UNK = "<unk>"

    def __init__(self, corpus_text: str = CORPUS_TEXT, weights=(0.7, 0.25, 0.05)):
        self.l2, self.l1, self.l0 = weights
        self.unigrams: Counter = Counter()
        self.bigrams: Counter = Counter()
        self.context_totals: Counter = Counter()
        for line in corpus_text.splitlines():
            tokens = word_tokens(line)
            if not tokens:
                continue
            prev = self.START
            for token in tokens:
                self.unigrams[token] += 1
                self.bigrams[(prev, token)] += 1
                self.context_totals[prev] += 1
                prev = token
        self.total_unigrams = sum(self.unigrams.values())
        self.vocab_size = len(self.unigrams)
        digest = hashlib.sha256(corpus_text.encode("utf-8")).hexdigest()[:12]
        self.version = f"corpus-{digest}"

    @property
    def model_id(self) -> str:
        return BUILTIN_MODEL_ID

    def _known(self, token: str) -> str:
        return token if token in self.unigrams else self.UNK

    def _prob(self, prev: str, token: str) -> float:
        p_uniform = 1.0 / (self.vocab_size + 1)
        if token == self.UNK:
            p_uni = 0.0
        else:
            p_uni = self.unigrams[token] / self.total_unigrams
        context_total = self.context_totals.get(prev, 0)
        p_bi = self.bigrams.get((prev, token), 0) / context_total if context_total else 0.0
        return self.l2 * p_bi + self.l1 * p_uni + self.l0 * p_uniform

    def mean_nll(self, text: str) -> float:
        """Mean negative log-likelihood per token; raises on empty text."""
        tokens = word_tokens(text)
        if not tokens:
            raise ValueError("cannot score empty text")
        nll = 0.0
        prev = self.START
        for token in tokens:
            token = self._known(token)
            nll -= math.log(self._prob(prev, token))
            prev = token
        return nll / len(tokens)


class HFCausalLM:
    """Pretrained causal language model scored through transformers.

    Texts are scored with an end-of-text token prepended as context, so even
    a single-token output has a conditional probability.
    """

    def __init__(self, model_id: str):
        try:
            import torch
            from transformers import AutoModelForCausalLM, AutoTokenizer
        except ImportError as exc:
            raise ModelUnavailableError(
                f"transformers/torch not installed; cannot load {model_id!r}"
            ) from exc
        try:
            self.tokenizer = AutoTokenizer.from_pretrained(model_id)
            self.model = AutoModelForCausalLM.from_pretrained(model_id)
        except Exception as exc:
            raise ModelUnavailableError(f"cannot load model {model_id!r}: {exc}") from exc
        self.model.eval()
        self._torch = torch
        self.model_id = model_id
        commit = getattr(self.model.config, "_commit_hash", None)
        self.version = commit or "local"

    def mean_nll(self, text: str) -> float:
        torch = self._torch
        ids = self.tokenizer.encode(text)
        if not ids:
            raise ValueError("cannot score empty text")
        bos = self.tokenizer.bos_token_id
        if bos is None:
            bos = self.tokenizer.eos_token_id
        input_ids = torch.tensor([[bos] + ids])
        with torch.no_grad():
            logits = self.model(input_ids).logits
        log_probs = torch.log_softmax(logits[0, :-1], dim=-1)
        token_nll = -log_probs[range(len(ids)), ids]
        return float(token_nll.mean())


def load_model(model_id: str):
    """Resolve a model id to a scoring backend."""
    if model_id == BUILTIN_MODEL_ID:
        return BigramLM()
    return HFCausalLM(model_id)
