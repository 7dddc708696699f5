"""Run configuration stored as a JSON file.

Example::

    {
      "master_seed": 7,
      "stress": {"kind": "arrhenius", "s0": 40.0, "sH": null},
      "fit": {"variant": "M0", "method": null, "epsilon": 0.01, "max_iter": 500,
              "bounds": {"alpha1": [-20, 20], "beta": [0.001, 5], "h": [1e-8, 0.99999999]},
              "theta0": null},
      "mc": {"n_paths": 10000, "horizon": 10000.0, "step": null, "x_th": 5.0,
             "stress": 40.0, "workers": 1, "r_target": 0.99},
      "evaluate": {"variants": ["M0", "M1", "M2", "M3"], "er_paths": 1000},
      "design": {...SimDesign fields...},
      "output_dir": "out"
    }

``sH: null`` means "highest stress present in the data".  Every key is
optional; missing keys take the defaults below.
"""

from __future__ import annotations

import copy
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from .model import AccelerationKind

DEFAULTS: dict = {
    "master_seed": 0,
    "stress": {"kind": AccelerationKind.ARRHENIUS.value, "s0": 40.0, "sH": None},
    "fit": {"variant": "M0", "method": None, "epsilon": 0.01, "max_iter": 500, "bounds": {}, "theta0": None},
    "mc": {"n_paths": 10_000, "horizon": 10_000.0, "step": None, "x_th": 5.0, "stress": None,
           "workers": 1, "r_target": 0.99},
    "evaluate": {"variants": ["M0", "M1", "M2", "M3"], "er_paths": 1000},
    "design": {},
    "output_dir": "out",
}


def _merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict) and out[key]:
            out[key] = _merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


@dataclass
class RunConfig:
    values: dict = field(default_factory=lambda: copy.deepcopy(DEFAULTS))

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        unknown = set(d) - set(DEFAULTS)
        if unknown:
            raise ValueError(f"unknown config section(s): {', '.join(sorted(unknown))}")
        return cls(_merge(DEFAULTS, d))

    @classmethod
    def load(cls, path) -> "RunConfig":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))

    def to_dict(self) -> dict:
        return copy.deepcopy(self.values)

    def dumps(self) -> str:
        return json.dumps(self.values, indent=2, sort_keys=True) + "\n"

    def save(self, path) -> None:
        Path(path).write_text(self.dumps(), encoding="utf-8")

    def with_overrides(self, **sections) -> "RunConfig":
        return RunConfig(_merge(self.values, sections))

    @property
    def hash(self) -> str:
        canonical = json.dumps(self.values, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()[:16]

    def __getitem__(self, key):
        return self.values[key]
