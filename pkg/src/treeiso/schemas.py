"""JSON schemas for the CLI's machine-readable output.

Every command emits {"config": ..., "results": ...}; the per-command result
schemas below are what downstream tooling may rely on. The test suite
validates real CLI output against these documents.
"""

CONFIG_SCHEMA = {
    "type": "object",
    "required": ["command", "format"],
    "properties": {
        "command": {"type": "string"},
        "model": {"type": ["string", "null"]},
        "degrees": {"type": ["array", "null"], "items": {"type": "integer"}},
        "weights": {"type": ["array", "null"], "items": {"type": "string"}},
        "n": {"type": ["integer", "null"]},
        "n_max": {"type": ["integer", "null"]},
        "order": {"type": ["integer", "null"]},
        "t": {"type": ["string", "null"]},
        "precision_bits": {"type": ["integer", "null"]},
        "seed": {"type": ["integer", "null"]},
        "stream": {"type": ["integer", "null"]},
        "samples": {"type": ["integer", "null"]},
        "workers": {"type": ["integer", "null"]},
        "format": {"type": "string", "enum": ["json", "csv"]},
        "digits": {"type": ["integer", "null"]},
        "strict": {"type": ["boolean", "null"]},
        "ceiling": {"type": ["integer", "null"]},
        "which": {"type": ["string", "null"]},
        "fd_step": {"type": ["string", "null"]},
        "stability": {"type": ["boolean", "null"]},
    },
    "additionalProperties": False,
}

EXACT_RESULT_SCHEMA = {
    "type": "array",
    "items": {
        "type": "object",
        "required": ["n", "model", "probability", "probability_decimal", "digits"],
        "properties": {
            "n": {"type": "integer"},
            "model": {"type": "string"},
            "probability": {"type": "string", "pattern": "^-?[0-9]+(/[0-9]+)?$"},
            "probability_decimal": {"type": "string"},
            "digits": {"type": "integer"},
            "classes": {"type": "integer"},
        },
        "additionalProperties": False,
    },
}

SERIES_RESULT_SCHEMA = {
    "type": "object",
    "required": ["family", "t", "order", "coefficients"],
    "properties": {
        "family": {"type": "string"},
        "t": {"type": "string"},
        "order": {"type": "integer"},
        "coefficients": {"type": "array", "items": {"type": "string"}},
        "oracle_checked_to": {"type": ["integer", "null"]},
        "oracle_match": {"type": ["boolean", "null"]},
    },
    "additionalProperties": False,
}

MC_RESULT_SCHEMA = {
    "type": "array",
    "items": {
        "type": "object",
        "required": ["n", "model", "estimate", "ci_low", "ci_high", "samples", "hits", "seed", "stream", "method"],
        "properties": {
            "n": {"type": "integer"},
            "model": {"type": "string"},
            "estimate": {"type": "number"},
            "ci_low": {"type": "number"},
            "ci_high": {"type": "number"},
            "samples": {"type": "integer"},
            "hits": {"type": "integer"},
            "seed": {"type": "integer"},
            "stream": {"type": "integer"},
            "method": {"type": "string"},
            "exact": {"type": ["string", "null"]},
            "exact_in_ci": {"type": ["boolean", "null"]},
        },
        "additionalProperties": False,
    },
}

ASYM_RESULT_SCHEMA = {
    "type": "array",
    "items": {
        "type": "object",
        "required": ["name", "value"],
        "properties": {
            "name": {"type": "string"},
            "value": {"type": "number"},
            "paper_target": {"type": ["number", "null"]},
            "abs_deviation": {"type": ["number", "null"]},
            "tolerance": {"type": ["number", "null"]},
            "within_tolerance": {"type": ["boolean", "null"]},
            "diagnostics": {"type": "object"},
        },
        "additionalProperties": False,
    },
}

PLANE_DECAY_RESULT_SCHEMA = {
    "type": "array",
    "items": {
        "type": "object",
        "required": ["n", "q_exact", "rate"],
        "properties": {
            "n": {"type": "integer"},
            "q_exact": {"type": "string"},
            "q_decimal": {"type": "string"},
            "rate": {"type": "number"},
            "plane_trees": {"type": "string"},
        },
        "additionalProperties": False,
    },
}

ENVELOPE_SCHEMA = {
    "type": "object",
    "required": ["config", "results"],
    "properties": {
        "config": CONFIG_SCHEMA,
        "results": {},
    },
    "additionalProperties": False,
}

RESULT_SCHEMAS = {
    "exact": EXACT_RESULT_SCHEMA,
    "series": SERIES_RESULT_SCHEMA,
    "mc": MC_RESULT_SCHEMA,
    "asym": ASYM_RESULT_SCHEMA,
    "plane-decay": PLANE_DECAY_RESULT_SCHEMA,
}
