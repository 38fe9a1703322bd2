"""Exact simulation of locally decodable codes, one-query quantum decoders and
private information retrieval, with the probability and entropy audits that
go with them."""

from . import bounds, cdec, cli, codes, pir, qcore, qdec, rac

__version__ = "0.1.0"

__all__ = ["bounds", "cdec", "cli", "codes", "pir", "qcore", "qdec", "rac", "__version__"]
