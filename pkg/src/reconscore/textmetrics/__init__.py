"""Reference-based caption metrics on a shared tokenizer."""

from .bleu import bleu
from .cider import cider_d
from .meteor import meteor, meteor_corpus
from .rouge import rouge_l, rouge_l_corpus
from .stemmer import stem
from .tokenizer import TokenSequence, tokenize
from .types import EvalInstance, MetricScore, load_corpus, make_instance

__all__ = [
    "bleu", "cider_d", "meteor", "meteor_corpus", "rouge_l", "rouge_l_corpus",
    "stem", "tokenize", "TokenSequence", "EvalInstance", "MetricScore",
    "load_corpus", "make_instance",
]
