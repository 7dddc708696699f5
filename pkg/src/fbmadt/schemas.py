"""JSON schemas of every report the CLI writes (documented in the README)."""

_num = {"type": "number"}
_num_or_null = {"type": ["number", "null"]}

THETA = {
    "type": "object",
    "required": ["mu_a", "sigma_a2", "alpha1", "beta", "sigma2", "h", "variant"],
    "properties": {
        "mu_a": _num, "sigma_a2": {"type": "number", "minimum": 0}, "alpha1": _num,
        "beta": {"type": "number", "exclusiveMinimum": 0}, "sigma2": {"type": "number", "minimum": 0},
        "h": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
        "variant": {"enum": ["M0", "M1", "M2", "M3"]},
    },
}

_provenance = {
    "config_hash": {"type": "string"},
    "master_seed": {"type": "integer"},
    "units": {"type": "object"},
}

FIT = {
    "type": "object",
    "required": ["method", "variant", "theta", "theta_sd", "n_params", "l_max", "aic", "iterations",
                 "converged", "trace"],
    "properties": {
        "method": {"enum": ["em", "two_step", "mle_fixed", "truth"]},
        "variant": {"enum": ["M0", "M1", "M2", "M3"]},
        "theta": THETA,
        "theta_sd": {"type": "object"},
        "n_params": {"type": "integer", "minimum": 1},
        "l_max": _num_or_null,
        "aic": _num_or_null,
        "iterations": {"type": "integer", "minimum": 0},
        "converged": {"type": "boolean"},
        "trace": {"type": "array", "items": {"type": "object", "required": ["theta", "loglik"],
                                             "properties": {"theta": THETA, "loglik": _num_or_null}}},
        "warnings": {"type": "array", "items": {"type": "string"}},
    },
}

FIT_REPORT = {
    "type": "object",
    "required": ["command", "config_hash", "master_seed", "stress_spec", "fits"],
    "properties": {
        **_provenance,
        "command": {"const": "fit"},
        "stress_spec": {"type": "object", "required": ["kind", "s0", "sH"]},
        "fits": {"type": "array", "minItems": 1, "items": FIT},
    },
}

TRUTH_REPORT = {
    "type": "object",
    "required": ["command", "config_hash", "master_seed", "stress_spec", "fits", "design"],
    "properties": {**FIT_REPORT["properties"], "command": {"const": "simulate"}, "design": {"type": "object"}},
}

RELIABILITY_REPORT = {
    "type": "object",
    "required": ["command", "config_hash", "master_seed", "theta", "stress", "s_star", "x_th", "n_paths",
                 "censored_fraction", "time_at_reliability"],
    "properties": {
        **_provenance,
        "command": {"const": "reliability"},
        "theta": THETA,
        "stress": _num, "s_star": _num, "x_th": _num,
        "n_paths": {"type": "integer", "minimum": 1},
        "censored_fraction": {"type": "number", "minimum": 0, "maximum": 1},
        "time_at_reliability": {"type": "object"},
    },
}

ER = {
    "type": "object",
    "required": ["levels", "er_mean", "er_upper", "er_lower", "skipped_terms"],
    "properties": {
        "levels": {"type": "array"},
        "er_mean": _num_or_null, "er_upper": _num_or_null, "er_lower": _num_or_null,
        "skipped_terms": {"type": "integer", "minimum": 0},
    },
}

MODEL_ROW = {
    "type": "object",
    "required": ["variant", "method", "theta", "l_max", "n_params", "aic"],
    "properties": {"variant": {"enum": ["M0", "M1", "M2", "M3"]}, "theta": THETA, "l_max": _num,
                   "n_params": {"type": "integer"}, "aic": _num, "er": ER},
}

EVALUATE_REPORT = {
    "type": "object",
    "required": ["command", "config_hash", "master_seed", "models"],
    "properties": {**_provenance, "command": {"const": "evaluate"},
                   "models": {"type": "array", "items": MODEL_ROW}},
}

CROSSVAL_REPORT = {
    "type": "object",
    "required": ["command", "config_hash", "master_seed", "plans"],
    "properties": {
        **_provenance,
        "command": {"const": "crossval"},
        "plans": {"type": "array", "items": {
            "type": "object", "required": ["held_out", "test_stress", "models"],
            "properties": {"held_out": {"enum": ["lowest_stress", "highest_stress"]}, "test_stress": _num,
                           "models": {"type": "array", "items": {
                               "type": "object", "required": ["variant", "theta", "er"],
                               "properties": {"theta": THETA, "er": ER}}}},
        }},
    },
}

ERROR_REPORT = {
    "type": "object",
    "required": ["error", "message"],
    "properties": {"error": {"type": "string"}, "message": {"type": "string"}},
}
