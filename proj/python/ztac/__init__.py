"""Python bindings for the ztac zero-trust access decision engine.

Structured requests and results cross the boundary as JSON; the helpers here
accept and return plain dicts.
"""

import json

from ._core import (
    Error,
    InvalidArgument,
    ParseError,
    SchemaError,
    bond_trust,
    bt_b_score,
    canonical_dump,
    cosine_similarity,
    critical_trust,
    ct_status,
    decide,
    decode_component,
    decode_final,
    encode_component,
    encode_final,
    format_utc,
    generate_dataset,
    parse_utc,
    scan_identifiers,
    softmax_normalize,
    tokenize,
    verify_audit_log,
)
from ._core import Engine as _Engine
from ._core import golden_request as _golden_request

__all__ = [
    "Engine",
    "Error",
    "InvalidArgument",
    "ParseError",
    "SchemaError",
    "bond_trust",
    "bt_b_score",
    "canonical_dump",
    "cosine_similarity",
    "critical_trust",
    "ct_status",
    "decide",
    "decode_component",
    "decode_final",
    "encode_component",
    "encode_final",
    "format_utc",
    "generate_dataset",
    "golden_request",
    "parse_utc",
    "scan_identifiers",
    "softmax_normalize",
    "tokenize",
    "verify_audit_log",
]


def golden_request(seed):
    return json.loads(_golden_request(seed))


class Engine:
    """Scoring and decisions over models built from the configured corpus."""

    def __init__(self, config=None):
        self._engine = _Engine(json.dumps(config or {}))

    def score(self, request):
        return json.loads(self._engine.score(json.dumps(request)))

    def decide(self, request, now):
        return json.loads(self._engine.decide(json.dumps(request), now))

    def evaluate(self, dataset_jsonl, threshold=0.7, threads=1):
        return json.loads(self._engine.evaluate(dataset_jsonl, threshold, threads))
