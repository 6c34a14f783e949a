"""Training loop, evaluation, checkpoint round-trip, and ablation runs.

Everything downstream of a validated corpus is deterministic in the config
seed: parameter init, shuffle order, and every dropout mask.  Two runs with
the same seed produce identical loss curves and reports.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np

from .autodiff import NonFiniteError, Tensor
from .checkpoint import CheckpointError, load_checkpoint, restore_into, save_checkpoint
from .config import TrainConfig, config_from_dict
from .corpus import split_corpus
from .encoder import build_vocab
from .graphs import (build_causal_kg, build_time_matrices, kg_from_dict,
                     kg_to_dict, sentence_causal_adj)
from .metrics import build_report
from .model import TCGATModel, VARIANTS
from .optim import Adam
from .params import DropoutKeys

EARLY_STOP_DELTA = 1e-6


class NumericalError(RuntimeError):
    """Training hit a non-finite value; carries epoch and batch position."""


@dataclass
class TrainResult:
    model: TCGATModel
    config: TrainConfig
    vocab: dict
    kg: object
    loss_curve: list
    stopped_early: bool


def prepare_inputs(sentences, kg):
    """Precompute the per-sentence graph inputs once."""
    return [(s, build_time_matrices(s), sentence_causal_adj(kg, s))
            for s in sentences]


def _dropout_seed(seed, epoch, batch_index):
    return (int(seed) << 40) + (epoch << 20) + batch_index


def train(config, train_sentences, embedding_path=None, checkpoint_path=None,
          progress=None):
    """Train one model; returns the model with its loss curve.

    When ``checkpoint_path`` is given the parameters and rebuild metadata
    are saved there after the final epoch.
    """
    config.validate()
    if not train_sentences:
        raise ValueError("training corpus is empty")
    vocab = {} if config.external_dim else build_vocab(train_sentences)
    kg = build_causal_kg(train_sentences)
    model = TCGATModel(config.model_config(), vocab=vocab or None,
                       embedding_path=embedding_path, seed=config.seed)
    opt = Adam(model.named_tensors(), lr=config.lr,
               clip_norm=config.clip_norm or None)
    inputs = prepare_inputs(train_sentences, kg)
    order_rng = random.Random(config.seed)
    n = len(inputs)
    loss_curve = []
    best = float("inf")
    bad_epochs = 0
    stopped_early = False
    for epoch in range(config.epochs):
        order = list(range(n))
        order_rng.shuffle(order)
        epoch_total = 0.0
        for batch_index, start in enumerate(range(0, n, config.batch_size)):
            chunk = order[start:start + config.batch_size]
            keys = DropoutKeys(_dropout_seed(config.seed, epoch, batch_index))
            try:
                total = None
                for k in chunk:
                    sentence, tm, adj = inputs[k]
                    loss = model.sentence_loss(sentence, tm, adj,
                                               train=True, keys=keys)
                    total = loss if total is None else total + loss
                batch_loss = total * Tensor(np.float32(1.0 / len(chunk)))
                opt.zero_grad()
                batch_loss.backward()
                opt.step()
            except NonFiniteError as exc:
                raise NumericalError(
                    f"non-finite value at epoch {epoch} batch {batch_index}: "
                    f"{exc}") from exc
            epoch_total += float(batch_loss.data) * len(chunk)
        epoch_loss = epoch_total / n
        loss_curve.append(epoch_loss)
        if progress is not None:
            progress(epoch, epoch_loss)
        if epoch_loss < best - EARLY_STOP_DELTA:
            best = epoch_loss
            bad_epochs = 0
        else:
            bad_epochs += 1
            if bad_epochs >= config.patience:
                stopped_early = True
                break
    result = TrainResult(model=model, config=config, vocab=vocab, kg=kg,
                         loss_curve=loss_curve, stopped_early=stopped_early)
    if checkpoint_path is not None:
        save_result(result, checkpoint_path)
    return result


def save_result(result, path):
    meta = {
        "config": result.config.to_dict(),
        "vocab": result.vocab,
        "kg": kg_to_dict(result.kg),
        "loss_curve": result.loss_curve,
        "stopped_early": result.stopped_early,
    }
    save_checkpoint(path, result.model.named_tensors(), meta)


def load_model(path, embedding_path=None):
    """Rebuild a trained model from a checkpoint and its metadata sidecar."""
    tensors, meta = load_checkpoint(path)
    if meta is None:
        raise CheckpointError(f"missing metadata sidecar for {path}")
    config = config_from_dict(meta["config"])
    vocab = meta["vocab"]
    kg = kg_from_dict(meta["kg"])
    model = TCGATModel(config.model_config(), vocab=vocab or None,
                       embedding_path=embedding_path, seed=config.seed)
    restore_into(model, tensors)
    return model, config, kg, meta


def evaluate(model, sentences, kg):
    """Score predictions against gold tags over a sentence list."""
    gold = []
    pred = []
    for sentence, tm, adj in prepare_inputs(sentences, kg):
        gold.append(sentence.causal_tags)
        pred.append(model.predict_tags(sentence, tm, adj))
    return build_report(gold, pred)


def run_ablation(config, sentences, variants=VARIANTS, embedding_path=None,
                 progress=None):
    """Train and evaluate each variant on one seeded 2:1 split."""
    train_split, test_split = split_corpus(sentences, seed=config.seed)
    results = {}
    for variant in variants:
        if variant not in VARIANTS:
            raise ValueError(f"unknown variant {variant!r}")
        cfg = config_from_dict({**config.to_dict(), "variant": variant})
        hook = None
        if progress is not None:
            def hook(epoch, loss, _variant=variant):
                progress(_variant, epoch, loss)
        outcome = train(cfg, train_split, embedding_path=embedding_path,
                        progress=hook)
        results[variant] = evaluate(outcome.model, test_split, outcome.kg)
    return results


def format_ablation(results):
    """Comparison table over variants, one row each."""
    lines = [f"{'variant':<16}{'P_C':>8}{'R_C':>8}{'F1_C':>8}"
             f"{'P_E':>8}{'R_E':>8}{'F1_E':>8}{'macro':>8}"]
    for variant, report in results.items():
        c = report.per_class["C"]
        e = report.per_class["E"]
        lines.append(f"{variant:<16}{c.precision:>8.4f}{c.recall:>8.4f}"
                     f"{c.f1:>8.4f}{e.precision:>8.4f}{e.recall:>8.4f}"
                     f"{e.f1:>8.4f}{report.macro_f1:>8.4f}")
    return "\n".join(lines)
