"""strigraph: a string-graph rewriting workbench.

Validation, double-pushout rewriting, wire-homeomorphism normalization,
framed-cospan composition, dense tensor semantics, and conjecture synthesis,
with bundled Z/X and GHZ/W theories.
"""

__version__ = "0.1.0"
