"""Seeded synthetic corpus generation.

Stands in for unreleased annotated data.  Four sentence families control how
much signal lives in the surface text versus the temporal annotation:

* ``lex``   - cause/effect nouns from disjoint vocabularies joined by a
  causal verb ("heavy rain caused severe floods"); solvable from tokens alone.
* ``chain`` - one cause with two simultaneous effects; exercises the S
  relation and multi-effect cross products.
* ``amb``   - two nouns from a shared event pool and a direction-neutral
  connective; which noun is the cause is encoded *only* in the direction of
  the stored before-relation, so surface context alone cannot resolve it.
* ``dis``   - distractors: a temporal relation is present but no causal pair
  (all-O tags), covering the remaining relation types.

Cause tokens always temporally precede effect tokens (a ``B`` relation from
cause to effect) by construction.  Sentence ids carry the family prefix so
evaluations can be restricted to a family subset.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .corpus import validate_record

LEX_CAUSES = ("rain", "smoking", "drought", "earthquake", "overheating",
              "corrosion", "frost", "lightning", "erosion", "contamination")
LEX_EFFECTS = ("floods", "cancer", "famine", "damage", "failure",
               "rust", "blight", "wildfire", "landslides", "sickness")
LEX_VERBS = ("caused", "triggered", "produced", "provoked")
LEX_MODIFIERS = (("heavy", "severe"), ("the", "the"), ("persistent", "widespread"),
                 ("sudden", "lasting"))

AMB_EVENTS = ("fire", "panic", "flood", "collapse", "outage", "protest",
              "crash", "shortage", "riot", "blackout", "strike", "surge")
AMB_CONNECTIVES = ("linked", "coupled", "entangled")

DIS_VERB_REL = (
    (("happened", "before"), "B"),
    (("happened", "after"), "A"),
    (("spanned",), "I"),
    (("ran", "alongside"), "S"),
)


class TemplateConfigError(ValueError):
    """The generator configuration is inconsistent or empty."""


@dataclass
class GeneratorConfig:
    """Family mix and vocabularies for :func:`generate_synthetic`."""

    ambiguous_fraction: float = 0.4
    distractor_fraction: float = 0.2
    chain_fraction: float = 0.1
    max_len: int = 50
    lex_causes: tuple = LEX_CAUSES
    lex_effects: tuple = LEX_EFFECTS
    amb_events: tuple = AMB_EVENTS

    def validate(self):
        fracs = (self.ambiguous_fraction, self.distractor_fraction, self.chain_fraction)
        if any(f < 0.0 or f > 1.0 for f in fracs):
            raise TemplateConfigError("family fractions must lie in [0, 1]")
        if sum(fracs) > 1.0 + 1e-9:
            raise TemplateConfigError("family fractions must sum to at most 1")
        if not self.lex_causes or not self.lex_effects:
            raise TemplateConfigError("lexical vocabularies must be non-empty")
        if len(self.amb_events) < 2:
            raise TemplateConfigError("need at least two ambiguous event nouns")
        if self.max_len < 8:
            raise TemplateConfigError("max_len too small for the sentence templates")


def build_simple_sentence(sid, cause="rain", effect="floods",
                          modifiers=("heavy", "severe"), verb="caused"):
    """The five-token template: [mod, cause, verb, mod, effect]."""
    record = {
        "id": sid,
        "tokens": [modifiers[0], cause, verb, modifiers[1], effect],
        "causal_tags": ["O", "C", "O", "O", "E"],
        "temporal": [[1, 4, "B"]],
    }
    return validate_record(record)


def _lexical(sid, rng, cfg):
    cause = rng.choice(cfg.lex_causes)
    effect = rng.choice(cfg.lex_effects)
    mods = rng.choice(LEX_MODIFIERS)
    verb = rng.choice(LEX_VERBS)
    return build_simple_sentence(sid, cause, effect, mods, verb)


def _chain(sid, rng, cfg):
    cause = rng.choice(cfg.lex_causes)
    e1, e2 = rng.sample(list(cfg.lex_effects), 2)
    verb = rng.choice(LEX_VERBS)
    record = {
        "id": sid,
        "tokens": [cause, verb, e1, "and", e2],
        "causal_tags": ["C", "O", "E", "O", "E"],
        "temporal": [[0, 2, "B"], [0, 4, "B"], [2, 4, "S"]],
    }
    return validate_record(record)


def _ambiguous(sid, rng, cfg):
    x, y = rng.sample(list(cfg.amb_events), 2)
    connective = rng.choice(AMB_CONNECTIVES)
    tokens = ["the", x, "and", "the", y, "were", connective]
    tags = ["O"] * 7
    if rng.random() < 0.5:
        cause_idx, effect_idx = 1, 4
    else:
        cause_idx, effect_idx = 4, 1
    tags[cause_idx] = "C"
    tags[effect_idx] = "E"
    record = {
        "id": sid,
        "tokens": tokens,
        "causal_tags": tags,
        "temporal": [[cause_idx, effect_idx, "B"]],
    }
    return validate_record(record)


def _distractor(sid, rng, cfg):
    x, y = rng.sample(list(cfg.amb_events), 2)
    verb, rel = rng.choice(DIS_VERB_REL)
    tokens = ["the", x, *verb, "the", y]
    j = len(tokens) - 1
    record = {
        "id": sid,
        "tokens": tokens,
        "causal_tags": ["O"] * len(tokens),
        "temporal": [[1, j, rel]],
    }
    return validate_record(record)


def generate_synthetic(n, seed, config=None):
    """Generate ``n`` validated sentences, deterministic for a fixed seed."""
    if n < 1:
        raise ValueError("n must be >= 1")
    cfg = config or GeneratorConfig()
    cfg.validate()
    rng = random.Random(seed)
    n_amb = int(round(n * cfg.ambiguous_fraction))
    n_dis = int(round(n * cfg.distractor_fraction))
    n_chain = int(round(n * cfg.chain_fraction))
    n_lex = n - n_amb - n_dis - n_chain
    if n_lex < 0:
        n_lex = 0
        n_amb = n - n_dis - n_chain
    plan = (["amb"] * n_amb + ["dis"] * n_dis + ["chain"] * n_chain + ["lex"] * n_lex)
    builders = {"amb": _ambiguous, "dis": _distractor,
                "chain": _chain, "lex": _lexical}
    sentences = []
    for k, family in enumerate(plan):
        sid = f"{family}-{k:04d}"
        sentences.append(builders[family](sid, rng, cfg))
    rng.shuffle(sentences)
    return sentences


def family_of(sentence):
    """The generator family encoded in a synthetic sentence id."""
    return sentence.id.split("-", 1)[0]
