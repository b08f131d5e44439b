"""Exact Turaev-Viro-Barrett-Westbury invariants of closed oriented
3-manifolds for Tambara-Yamagami categories TY(A, chi, nu).

Two independent evaluators are provided: a brute-force state sum over all
admissible edge colorings, and a fixed-parameter evaluator that partitions
colorings by their mod-2 cocycle of m-labeled edges and collapses each part
into an exactly evaluated quadratic Gauss sum.
"""

__version__ = "0.1.0"
