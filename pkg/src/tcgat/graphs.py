"""Per-sentence temporal adjacency matrices and the corpus causal graph.

Each sentence yields six L x L binary matrices, one per temporal relation
plus the self-designation matrix M.  M marks tokens that take part in at
least one temporal relation, and additionally picks up a fallback self-loop
for every token whose row would otherwise be all zero across the six
matrices, so downstream attention never sees an empty row.

The causal graph is built from the training split only: every C-tagged
token is connected to every E-tagged token of the same sentence by a
directed cause->effect edge over lowercased tokens.  Its per-sentence
projection is symmetric (an edge in either direction counts) and carries
self-loops on the diagonal.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

RELATION_ORDER = ("B", "A", "S", "I", "M", "N")


@dataclass
class TimeMatrices:
    adj_B: np.ndarray
    adj_A: np.ndarray
    adj_S: np.ndarray
    adj_I: np.ndarray
    adj_N: np.ndarray
    adj_M: np.ndarray

    def by_relation(self):
        """Matrices keyed by relation symbol, in canonical order."""
        return {
            "B": self.adj_B, "A": self.adj_A, "S": self.adj_S,
            "I": self.adj_I, "M": self.adj_M, "N": self.adj_N,
        }

    def row_degrees(self):
        """Per-token count of outgoing edges summed over all six matrices."""
        total = (self.adj_B + self.adj_A + self.adj_S
                 + self.adj_I + self.adj_N + self.adj_M)
        return total.sum(axis=1)


def build_time_matrices(sentence):
    """Build the six temporal adjacency matrices for a validated sentence."""
    length = len(sentence)
    mats = {r: np.zeros((length, length), dtype=np.float32) for r in RELATION_ORDER}
    participants = set()
    for i, j, rel in sentence.temporal_relations:
        mats[rel][i, j] = 1.0
        participants.add(i)
        participants.add(j)
    for i in participants:
        mats["M"][i, i] = 1.0
    degrees = sum(mats[r] for r in RELATION_ORDER).sum(axis=1)
    for i in range(length):
        if degrees[i] == 0.0:
            mats["M"][i, i] = 1.0
    return TimeMatrices(adj_B=mats["B"], adj_A=mats["A"], adj_S=mats["S"],
                        adj_I=mats["I"], adj_N=mats["N"], adj_M=mats["M"])


def normalize_token(token):
    return token.lower()


@dataclass
class CausalKG:
    """Directed cause->effect co-occurrence graph over normalized tokens."""

    nodes: dict = field(default_factory=dict)
    edges: dict = field(default_factory=dict)

    def node_id(self, token, create=False):
        key = normalize_token(token)
        if key not in self.nodes:
            if not create:
                return None
            self.nodes[key] = len(self.nodes)
        return self.nodes[key]

    def add_edge(self, cause, effect):
        """Record one cause->effect observation; self-edges are dropped."""
        c = self.node_id(cause, create=True)
        e = self.node_id(effect, create=True)
        if c == e:
            return
        self.edges[(c, e)] = self.edges.get((c, e), 0) + 1

    def linked(self, a, b):
        """True when an edge exists between the tokens in either direction."""
        ia = self.node_id(a)
        ib = self.node_id(b)
        if ia is None or ib is None or ia == ib:
            return False
        return (ia, ib) in self.edges or (ib, ia) in self.edges


def build_causal_kg(train_sentences):
    """Fold the training split into a CausalKG.

    Every (C token, E token) pair of a sentence contributes one directed
    edge.  Merging per-shard graphs must reproduce this sequential result,
    so ids are assigned in first-encounter order only.
    """
    kg = CausalKG()
    for sentence in train_sentences:
        causes = [t for t, tag in zip(sentence.tokens, sentence.causal_tags) if tag == "C"]
        effects = [t for t, tag in zip(sentence.tokens, sentence.causal_tags) if tag == "E"]
        for c in causes:
            for e in effects:
                kg.add_edge(c, e)
    return kg


def sentence_causal_adj(kg, sentence):
    """Project the KG onto one sentence: symmetric hits plus self-loops."""
    length = len(sentence)
    adj = np.eye(length, dtype=np.float32)
    for i in range(length):
        for j in range(i + 1, length):
            if kg.linked(sentence.tokens[i], sentence.tokens[j]):
                adj[i, j] = 1.0
                adj[j, i] = 1.0
    return adj


def kg_to_dict(kg):
    id_to_token = {v: k for k, v in kg.nodes.items()}
    return {
        "nodes": [id_to_token[i] for i in range(len(kg.nodes))],
        "edges": [[c, e, n] for (c, e), n in sorted(kg.edges.items())],
    }


def kg_from_dict(payload):
    kg = CausalKG()
    for token in payload["nodes"]:
        kg.node_id(token, create=True)
    for c, e, n in payload["edges"]:
        kg.edges[(c, e)] = n
    return kg


def time_matrices_to_dict(tm):
    return {r: m.astype(int).tolist() for r, m in tm.by_relation().items()}
