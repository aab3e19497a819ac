"""JSON Schemas (draft 2020-12) for every JSON document the CLI writes."""

CONFIG_TEXT = {"type": "string", "pattern": r"^\[[1-9][0-9]*(,[1-9][0-9]*)*\]$"}
LAZY_TEXT = {"type": "string", "pattern": r"^base:[1-9][0-9]*(\[[1-9][0-9]*(,[1-9][0-9]*)*\])?$"}
WORD_TEXT = {"type": "string", "pattern": r"^([1-9][0-9]*\^[1-9][0-9]*( [1-9][0-9]*\^[1-9][0-9]*)*)?$"}
NAT = {"type": "integer", "minimum": 0}
POS = {"type": "integer", "minimum": 1}
OPT_POS = {"type": ["integer", "null"], "minimum": 1}
PROB = {"type": "number", "minimum": 0, "maximum": 1}
HISTOGRAM = {"type": "object", "propertyNames": CONFIG_TEXT, "additionalProperties": NAT}


def _obj(props: dict, optional: tuple[str, ...] = ()) -> dict:
    return {
        "type": "object",
        "properties": props,
        "required": [k for k in props if k not in optional],
        "additionalProperties": False,
    }


APPLY = _obj({"config": {"type": "string"}, "word": WORD_TEXT, "result": {"type": "string"}})

PLAN = _obj({
    "k": POS, "l": POS, "N": POS,
    "d": OPT_POS, "r": OPT_POS, "M": OPT_POS,
    "word": WORD_TEXT, "length": NAT, "bound": POS, "target": CONFIG_TEXT,
    "accounting": _obj({
        "L_actual": NAT, "L_paper_formula": NAT, "bound": POS,
        "derivation_bound": POS, "prefix_len": NAT,
    }),
}, optional=("accounting",))

CHECK = _obj({
    "name": {"type": "string"},
    "passed": {"type": "boolean"},
    "counterexample": {"anyOf": [CONFIG_TEXT, {"type": "null"}]},
    "details": {"type": "object"},
})

VERIFICATION = _obj({
    "k": POS, "l": POS, "N": OPT_POS,
    "d": OPT_POS, "r": OPT_POS, "M": OPT_POS,
    "universe_size": POS,
    "passed": {"type": "boolean"},
    "checks": {"type": "array", "items": CHECK},
    "elapsed": {"type": "number", "minimum": 0},
})

SYNC = _obj({
    "l": POS,
    "alphabet": {"type": "array", "items": POS, "minItems": 1},
    "method": {"enum": ["exact", "greedy"]},
    "word": WORD_TEXT,
    "length": NAT,
    "terminal": CONFIG_TEXT,
    "optimal": {"type": "boolean"},
    "probability": PROB,
    "probability_per_length": {"type": ["number", "null"], "minimum": 0},
}, optional=("probability", "probability_per_length"))

TV_ROW = _obj({"step": POS, "tv": PROB, "uncoupledFraction": PROB})
TV_SERIES = {"anyOf": [{"type": "null"}, {"type": "array", "items": TV_ROW}]}

SIMULATION = _obj({
    "steps": POS,
    "seed": {"type": "integer"},
    "distribution": {"type": "string"},
    "initial": LAZY_TEXT,
    "binsCreated": NAT,
    "frontSpeedEstimate": PROB,
    "depth": POS,
    "burnIn": NAT,
    "watchWord": {"anyOf": [WORD_TEXT, {"type": "null"}]},
    "regenerationCount": NAT,
    "regenerationTimes": {"type": "array", "items": POS},
    "regenerationSound": {"type": ["boolean", "null"]},
    "regenerativeFrontSpeed": {"anyOf": [{"type": "null"}, _obj({
        "estimate": {"type": "number"}, "stderr": {"type": "number", "minimum": 0}, "cycles": POS,
    })]},
    "topBinHistogram": HISTOGRAM,
    "regenerationTopBins": HISTOGRAM,
    "tvDistanceSeries": TV_SERIES,
})

COUPLING = _obj({
    "steps": POS,
    "seed": {"type": "integer"},
    "distribution": {"type": "string"},
    "initialA": LAZY_TEXT,
    "initialB": LAZY_TEXT,
    "projection": POS,
    "agreementTime": {"type": ["integer", "null"], "minimum": 0},
    "violations": NAT,
    "persistent": {"type": "boolean"},
    "watchWord": {"anyOf": [WORD_TEXT, {"type": "null"}]},
    "firstWatchEnd": OPT_POS,
    "watchOccurrences": NAT,
    "watchPositions": NAT,
    "frontSpeedEstimateA": PROB,
    "frontSpeedEstimateB": PROB,
    "tvDistanceSeries": TV_SERIES,
})

STATIONARY = _obj({
    "distribution": {"type": "string"},
    "depth": POS,
    "replicas": POS,
    "steps": POS,
    "seed": {"type": "integer"},
    "initials": {"type": "array", "items": LAZY_TEXT},
    "histograms": {"type": "array", "items": HISTOGRAM},
    "pairwise": {"type": "array", "items": _obj({
        "a": NAT, "b": NAT, "tv": PROB,
        "noiseMean": {"type": "number", "minimum": 0},
        "noiseSd": {"type": "number", "minimum": 0},
        "noiseFloor": {"type": "number", "minimum": 0},
        "flag": {"type": "boolean"},
        "degenerate": {"type": "boolean"},
        "sharedSupport": {"type": "boolean"},
    })},
    "converged": {"type": "boolean"},
})

BY_COMMAND = {
    "apply": APPLY,
    "construct": PLAN,
    "verify": VERIFICATION,
    "lemmas": VERIFICATION,
    "sync": SYNC,
    "simulate": SIMULATION,
    "simulate --two-chain": COUPLING,
    "simulate --stationary": STATIONARY,
    "couple2": COUPLING,
}
