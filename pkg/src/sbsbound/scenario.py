"""JSON scenario and ensemble files.

Complex numbers may be written as plain numbers, ``[re, im]`` pairs or
strings such as ``"0.5-1j"``. See ``scenarios/README.md`` for the schema.
"""

from __future__ import annotations

import copy
import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from . import linalg as la
from .dynamics import Environment, VonNeumannModel
from .errors import ValidationError
from .sampling import random_density, random_hermitian, random_pure

PAULI = {
    "pauli_x": np.array([[0, 1], [1, 0]], dtype=complex),
    "pauli_y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "pauli_z": np.array([[1, 0], [0, -1]], dtype=complex),
}
NAMED_VECTORS = {
    "zero": np.array([1, 0], dtype=complex),
    "one": np.array([0, 1], dtype=complex),
    "plus": np.array([1, 1], dtype=complex) / np.sqrt(2),
    "minus": np.array([1, -1], dtype=complex) / np.sqrt(2),
}


def parse_complex(v) -> complex:
    if isinstance(v, bool):
        raise ValidationError(f"not a number: {v!r}")
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, str):
        try:
            return complex(v.replace(" ", ""))
        except ValueError:
            raise ValidationError(f"cannot parse complex number {v!r}") from None
    if isinstance(v, (list, tuple)) and len(v) == 2 and all(isinstance(a, (int, float)) for a in v):
        return complex(v[0], v[1])
    raise ValidationError(f"cannot parse complex number {v!r}")


def parse_vector(v) -> np.ndarray:
    if not isinstance(v, list) or not v:
        raise ValidationError("a vector must be a non-empty list")
    return np.array([parse_complex(a) for a in v])


def parse_matrix(m) -> np.ndarray:
    if not isinstance(m, list) or not m or not all(isinstance(r, list) for r in m):
        raise ValidationError("a matrix must be a list of rows")
    rows = [[parse_complex(a) for a in r] for r in m]
    if len({len(r) for r in rows}) != 1:
        raise ValidationError("matrix rows have different lengths")
    return np.array(rows)


def _rng(spec: dict, default_seed, salt):
    seed = spec.get("seed", default_seed)
    if seed is None:
        raise ValidationError("random preset needs a seed (in the preset or at scenario level)")
    return np.random.default_rng([int(seed), *salt])


def parse_generator(spec, seed=None, salt=()) -> np.ndarray:
    if isinstance(spec, str):
        if spec not in PAULI:
            raise ValidationError(f"unknown generator preset {spec!r}")
        return PAULI[spec]
    if isinstance(spec, dict) and len(spec) == 1:
        (kind, body), = spec.items()
        if kind == "matrix":
            return parse_matrix(body)
        if kind == "random_hermitian":
            return random_hermitian(_rng(body, seed, salt), int(body["dim"]))
    raise ValidationError(f"bad generator spec {spec!r}")


def parse_state(spec, seed=None, salt=()):
    """Returns ``(density, components)``; ``components`` is None unless a mixture is given."""
    if isinstance(spec, str):
        if spec not in NAMED_VECTORS:
            raise ValidationError(f"unknown state preset {spec!r}")
        v = NAMED_VECTORS[spec]
        return la.projector(v), (np.ones(1), v[None, :])
    if isinstance(spec, dict) and len(spec) == 1:
        (kind, body), = spec.items()
        if kind == "vector":
            v = la.as_pure_state(parse_vector(body))
            return la.projector(v), (np.ones(1), v[None, :])
        if kind == "density":
            return la.as_density_matrix(parse_matrix(body)), None
        if kind == "mixture":
            w = np.asarray(body["weights"], dtype=float)
            vecs = np.array([la.as_pure_state(parse_vector(x)) for x in body["vectors"]])
            if len(w) != len(vecs):
                raise ValidationError("mixture needs one weight per vector")
            if abs(w.sum() - 1.0) > 1e-10 or np.any(w < 0):
                raise ValidationError("mixture weights must be a probability vector")
            rho = np.einsum("m,ma,mb->ab", w, vecs, vecs.conj())
            return rho, (w, vecs)
        if kind == "random_pure":
            v = random_pure(_rng(body, seed, salt), int(body["dim"]))
            return la.projector(v), (np.ones(1), v[None, :])
        if kind == "random_mixture":
            rng = _rng(body, seed, salt)
            d, r = int(body["dim"]), int(body["rank"])
            w = rng.dirichlet(np.ones(r))
            vecs = np.array([random_pure(rng, d) for _ in range(r)])
            return np.einsum("m,ma,mb->ab", w, vecs, vecs.conj()), (w, vecs)
        if kind == "random_density":
            return random_density(_rng(body, seed, salt), int(body["dim"]), body.get("rank")), None
    raise ValidationError(f"bad state spec {spec!r}")


def parse_times(spec) -> np.ndarray:
    if isinstance(spec, list):
        if not spec:
            raise ValidationError("empty time list")
        return np.array([float(t) for t in spec])
    if isinstance(spec, dict) and {"start", "stop", "steps"} <= spec.keys():
        n = int(spec["steps"])
        if n < 1:
            raise ValidationError("steps must be positive")
        return np.linspace(float(spec["start"]), float(spec["stop"]), n)
    raise ValidationError(f"bad time grid {spec!r}")


@dataclass(frozen=True)
class Scenario:
    """A parsed scenario file. ``spec`` holds the source dictionary verbatim."""

    spec: dict[str, Any]
    model: VonNeumannModel = field(compare=False, repr=False)
    times: np.ndarray = field(compare=False, repr=False)

    @property
    def name(self) -> str:
        return self.spec.get("name", "scenario")

    @property
    def strategy(self) -> str:
        return self.spec.get("strategy", "gram")

    @property
    def outputs(self) -> tuple[str, ...]:
        return tuple(self.spec.get("outputs", ("csv", "summary")))

    @classmethod
    def from_dict(cls, d: dict, seed: int | None = None) -> "Scenario":
        """Parse and validate. ``seed`` overrides the scenario-level seed."""
        if not isinstance(d, dict):
            raise ValidationError("scenario must be a JSON object")
        spec = copy.deepcopy(d)
        if seed is not None:
            spec["seed"] = int(seed)
        missing = {"x", "rho_s", "environments", "n_observed", "times"} - spec.keys()
        if missing:
            raise ValidationError(f"scenario is missing {sorted(missing)}")
        if spec.get("strategy", "gram") not in ("gram", "support"):
            raise ValidationError(f"unknown strategy {spec['strategy']!r}")
        bad = set(spec.get("outputs", ())) - {"csv", "summary"}
        if bad:
            raise ValidationError(f"unknown outputs {sorted(bad)}")
        base = spec.get("seed")
        x = np.array([float(v) for v in spec["x"]])
        rho_s, _ = parse_state(spec["rho_s"], base, (0,))
        envs = []
        for k, e in enumerate(spec["environments"]):
            try:
                gen = parse_generator(e["generator"], base, (1, k))
                rho, comps = parse_state(e["initial"], base, (2, k))
                envs.append(Environment(gen, float(e.get("coupling", 1.0)), rho, comps))
            except KeyError as exc:
                raise ValidationError(f"environment {k} is missing {exc}") from None
            except ValueError as exc:
                raise ValidationError(f"environment {k}: {exc}") from None
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                model = VonNeumannModel(x, rho_s, tuple(envs), int(spec["n_observed"]))
        except ValueError as exc:
            raise ValidationError(str(exc)) from None
        return cls(spec, model, parse_times(spec["times"]))

    def to_dict(self) -> dict:
        return copy.deepcopy(self.spec)

    @classmethod
    def load(cls, path, seed: int | None = None) -> "Scenario":
        return cls.from_dict(_read_json(path), seed)


def _read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON ({exc})") from None


@dataclass(frozen=True)
class EnsembleSpec:
    """Parsed ensemble file: weights, density matrices and optional pure components."""

    weights: np.ndarray
    states: np.ndarray
    components: tuple
    grid_steps: int | None = None

    @property
    def all_pure(self) -> bool:
        return all(c is not None and len(c[0]) == 1 for c in self.components)

    @property
    def has_components(self) -> bool:
        return all(c is not None for c in self.components)

    @classmethod
    def from_dict(cls, d: dict, seed: int | None = None) -> "EnsembleSpec":
        if not isinstance(d, dict) or "weights" not in d or "states" not in d:
            raise ValidationError("ensemble needs 'weights' and 'states'")
        base = seed if seed is not None else d.get("seed")
        rhos, comps = [], []
        for i, s in enumerate(d["states"]):
            rho, c = parse_state(s, base, (3, i))
            rhos.append(rho)
            comps.append(c)
        if len({r.shape for r in rhos}) != 1:
            raise ValidationError("ensemble states must share one dimension")
        w = np.asarray(d["weights"], dtype=float)
        if len(w) != len(rhos):
            raise ValidationError("need one weight per state")
        steps = d.get("grid_steps")
        return cls(w, np.array(rhos), tuple(comps), None if steps is None else int(steps))

    @classmethod
    def load(cls, path, seed: int | None = None) -> "EnsembleSpec":
        return cls.from_dict(_read_json(path), seed)
