"""Offline exporter of constituency parses and phrase embeddings.

Produces the two line-oriented file formats the quad-prediction pipeline
consumes: one bracketed tree per dataset sentence, and a "dim <d>" headed
phrase-embedding table. The pipeline never imports this package; the files
are the whole contract, so the parser and encoder backends are swappable
and recorded by identifier in the manifest.
"""

__version__ = "0.1.0"

PARSER_ID = "lexicon-chunker-v1"
ENCODER_ID = "hash-trigram-64-v1"
