"""Aspect sentiment quad prediction data machinery.

Subpackages and modules:

* corpus:     dataset model, JSONL/legacy ingestion, stats, validation
* syntax:     bracketed constituency trees, tree distance, POS search
* semantics:  phrase embeddings and cosine top-k selection
* template:   reasoning-style output rendering and parsing
* confuse:    confusable-candidate generation and listwise samples
* prefloss:   preference-loss kernels with verified gradients
* evaluation: exact-match F1 and the error taxonomy
* cli:        the `quadpref` command-line pipeline
"""

__version__ = "0.1.0"
