"""Membership-query synthesis for text classification.

Expand a small labeled core set of sentences into pools of new, readable
unlabeled queries by substituting words with semantic neighbors, optionally
steering the substitution chains with local search over an active-learning
utility, and feed the queries to a simulated or human oracle.
"""

__version__ = "0.1.0"
