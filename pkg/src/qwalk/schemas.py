"""JSON Schemas for the records the CLI emits."""

_STATE = {
    "type": "object",
    "required": ["arc"],
    "properties": {"arc": {"type": "array", "items": {"type": "integer"}, "minItems": 2, "maxItems": 2}},
}

_NULLABLE_INT = {"type": ["integer", "null"]}

HITTING_RECORD = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "qwalk hitting-time record",
    "type": "object",
    "required": ["model", "graph6", "structure_id", "x", "y", "eps", "value", "flags"],
    "properties": {
        "model": {"enum": ["arc-reversal", "shunt", "szegedy"]},
        "graph6": {"type": "string"},
        "structure_id": {"type": "string"},
        "x": _STATE,
        "y": _STATE,
        "eps": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
        "value": {
            "type": "object",
            "required": ["one_shot", "concurrent", "expected"],
            "properties": {
                "one_shot": _NULLABLE_INT,
                "concurrent": _NULLABLE_INT,
                "expected": {"type": "number", "minimum": 0},
            },
        },
        "flags": {
            "type": "object",
            "required": ["expected_converged", "truncation_bound", "k_max"],
            "properties": {
                "expected_converged": {"type": "boolean"},
                "truncation_bound": {"type": "number", "minimum": 0},
                "k_max": {"type": "integer", "minimum": 1},
            },
        },
    },
}

SZEGEDY_RECORD = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "qwalk two-reflection walk summary",
    "type": "object",
    "required": ["graph6", "order", "unitary", "mixing", "hitting"],
    "properties": {
        "graph6": {"type": "string"},
        "order": {"enum": ["r2r1", "r1r2"]},
        "unitary": {
            "type": "object",
            "required": ["dim", "support", "unitarity_defect"],
            "properties": {
                "dim": {"type": "integer", "minimum": 1},
                "support": {"type": "integer", "minimum": 0},
                "unitarity_defect": {"type": "number", "minimum": 0},
            },
        },
        "mixing": {
            "type": "object",
            "required": ["trace", "total_entropy", "walk_regular", "uniform", "trace_lower_bound", "groups"],
            "properties": {
                "trace": {"type": "number"},
                "total_entropy": {"type": "number"},
                "walk_regular": {"type": "boolean"},
                "uniform": {"type": "boolean"},
                "trace_lower_bound": {"type": "number"},
                "groups": {"type": "integer", "minimum": 1},
            },
        },
        "hitting": {"oneOf": [{"type": "null"}, HITTING_RECORD]},
    },
}

SCHEMAS = {"hitting": HITTING_RECORD, "szegedy": SZEGEDY_RECORD}
