"""Token-level evaluation: per-class precision/recall/F1 and Macro-F1.

Scoring is over individual token tags.  Only the C and E classes are
reported; Macro-F1 is the arithmetic mean of their two F1 values.  A class
that never occurs in the gold labels scores 0 and is flagged rather than
dropped, so degenerate test sets stay visible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import CAUSAL_TAGS

SCORED_TAGS = ("C", "E")


@dataclass
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    support: int
    absent_from_gold: bool


@dataclass
class EvalReport:
    per_class: dict
    macro_f1: float
    confusion: list

    def to_dict(self):
        return {
            "per_class": {
                tag: {
                    "precision": m.precision,
                    "recall": m.recall,
                    "f1": m.f1,
                    "support": m.support,
                    "absent_from_gold": m.absent_from_gold,
                }
                for tag, m in self.per_class.items()
            },
            "macro_f1": self.macro_f1,
            "confusion": {
                "tags": list(CAUSAL_TAGS),
                "counts": self.confusion,
            },
        }


def confusion_counts(gold_sequences, pred_sequences):
    """3x3 count matrix, gold tags on rows and predicted tags on columns."""
    index = {tag: k for k, tag in enumerate(CAUSAL_TAGS)}
    counts = np.zeros((len(CAUSAL_TAGS), len(CAUSAL_TAGS)), dtype=np.int64)
    if len(gold_sequences) != len(pred_sequences):
        raise ValueError("gold and prediction sequence counts differ")
    for gold, pred in zip(gold_sequences, pred_sequences):
        if len(gold) != len(pred):
            raise ValueError("gold and prediction lengths differ within a sentence")
        for g, p in zip(gold, pred):
            counts[index[g], index[p]] += 1
    return counts


def f1_score(precision, recall):
    if precision + recall <= 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def macro_f1(f1_c, f1_e):
    return (f1_c + f1_e) / 2.0


def class_metrics(confusion, tag):
    k = CAUSAL_TAGS.index(tag)
    tp = int(confusion[k, k])
    gold_total = int(confusion[k, :].sum())
    pred_total = int(confusion[:, k].sum())
    precision = tp / pred_total if pred_total > 0 else 0.0
    recall = tp / gold_total if gold_total > 0 else 0.0
    return ClassMetrics(precision=precision, recall=recall,
                        f1=f1_score(precision, recall),
                        support=gold_total,
                        absent_from_gold=gold_total == 0)


def build_report(gold_sequences, pred_sequences):
    confusion = confusion_counts(gold_sequences, pred_sequences)
    per_class = {tag: class_metrics(confusion, tag) for tag in SCORED_TAGS}
    return EvalReport(per_class=per_class,
                      macro_f1=macro_f1(per_class["C"].f1, per_class["E"].f1),
                      confusion=confusion.tolist())


def format_report(report):
    """Aligned text table, one row per scored class plus the macro line."""
    lines = [f"{'class':<8}{'precision':>10}{'recall':>10}{'f1':>10}{'support':>9}"]
    for tag in SCORED_TAGS:
        m = report.per_class[tag]
        flag = "  (absent from gold)" if m.absent_from_gold else ""
        lines.append(f"{tag:<8}{m.precision:>10.4f}{m.recall:>10.4f}"
                     f"{m.f1:>10.4f}{m.support:>9d}{flag}")
    lines.append(f"{'macro-f1':<8}{report.macro_f1:>10.4f}")
    return "\n".join(lines)
