"""Analysis configuration: JSON parsing and validation.

Complex scalars are ``[re, im]`` pairs (a bare number is read as real);
matrices are row-major nested lists.  ``W`` may instead be given in
eigen form as ``{"eigenvalues": [...], "eigenvectors": [v1, v2, ...]}``
with each vector a list of complex scalars.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ModalAlgError, ParseError, ValidationError
from .matrix_core import ToleranceContext
from .rules import RULES, BubRuleInput, make_density_state

CHECKS = ("closure", "quasiboolean", "statistics", "additivity", "demos")
DEFAULT_SAMPLES = {"closure": 200, "statistics": 20, "additivity": 10}


def encode_complex(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def encode_matrix(M) -> list:
    return [[encode_complex(z) for z in row] for row in np.asarray(M)]


def decode_complex(x, where: str) -> complex:
    if isinstance(x, bool):
        raise ValidationError(where, "expected a number or [re, im] pair")
    if isinstance(x, (int, float)):
        return complex(float(x), 0.0)
    if isinstance(x, list) and len(x) == 2 and all(isinstance(t, (int, float)) and not isinstance(t, bool) for t in x):
        return complex(float(x[0]), float(x[1]))
    raise ValidationError(where, "expected a number or [re, im] pair")


def decode_vector(x, where: str) -> np.ndarray:
    if not isinstance(x, list) or not x:
        raise ValidationError(where, "expected a non-empty list of complex entries")
    return np.array([decode_complex(z, f"{where}[{i}]") for i, z in enumerate(x)], dtype=complex)


def decode_matrix(x, where: str, n: int | None = None) -> np.ndarray:
    if not isinstance(x, list) or not x or not all(isinstance(r, list) for r in x):
        raise ValidationError(where, "expected a matrix as a list of rows")
    rows = [decode_vector(r, f"{where}[{i}]") for i, r in enumerate(x)]
    m = len(rows)
    if any(len(r) != m for r in rows):
        raise ValidationError(where, "matrix is not square")
    if n is not None and m != n:
        raise ValidationError(where, f"expected a {n}x{n} matrix, got {m}x{m}")
    return np.array(rows, dtype=complex)


@dataclass(frozen=True)
class AnalysisConfig:
    dimension: int
    W: np.ndarray
    rule: str
    checks: tuple
    seed: int
    tolerances: ToleranceContext
    samples: dict = field(default_factory=lambda: dict(DEFAULT_SAMPLES))
    psi: np.ndarray | None = None
    R: np.ndarray | None = None
    name: str = ""

    def bub_input(self) -> BubRuleInput | None:
        if self.rule != "bub":
            return None
        return BubRuleInput.build(self.psi, self.R, self.tolerances)

    def echo(self) -> dict:
        """Normalized JSON-compatible form; reloading it gives an equal config."""
        out = {
            "name": self.name,
            "dimension": self.dimension,
            "W": encode_matrix(self.W),
            "rule": self.rule,
            "checks": list(self.checks),
            "seed": self.seed,
            "tolerances": {
                "atol": self.tolerances.atol,
                "eig_cluster_tol": self.tolerances.eig_cluster_tol,
                "max_iter": self.tolerances.max_iter,
            },
            "samples": dict(sorted(self.samples.items())),
        }
        if self.rule == "bub":
            out["bub"] = {"psi": [encode_complex(z) for z in self.psi], "R": encode_matrix(self.R)}
        return out

    def with_overrides(self, seed=None, atol=None, eig=None) -> "AnalysisConfig":
        tol = self.tolerances
        tol = ToleranceContext(atol if atol is not None else tol.atol,
                               eig if eig is not None else tol.eig_cluster_tol, tol.max_iter)
        cfg = AnalysisConfig(self.dimension, self.W, self.rule, self.checks,
                             self.seed if seed is None else int(seed), tol, dict(self.samples),
                             self.psi, self.R, self.name)
        _validate_state(cfg)
        return cfg


def _validate_state(cfg: AnalysisConfig):
    try:
        make_density_state(cfg.W, cfg.tolerances)
    except ModalAlgError as exc:
        raise ValidationError("W", str(exc)) from exc
    if cfg.rule == "bub":
        try:
            inp = cfg.bub_input()
        except (ValueError, ModalAlgError) as exc:
            raise ValidationError("bub", str(exc)) from exc
        pure = np.outer(inp.psi, inp.psi.conj())
        if np.linalg.norm(pure - cfg.W, 2) > cfg.tolerances.atol:
            raise ValidationError("W", "for the bub rule W must equal the projector onto psi")


def _read_W(raw, n):
    if isinstance(raw, dict):
        if set(raw) != {"eigenvalues", "eigenvectors"}:
            raise ValidationError("W", "eigen form needs exactly 'eigenvalues' and 'eigenvectors'")
        vals = raw["eigenvalues"]
        vecs = raw["eigenvectors"]
        if not isinstance(vals, list) or not isinstance(vecs, list) or len(vals) != len(vecs):
            raise ValidationError("W.eigenvalues", "need one eigenvalue per eigenvector")
        W = np.zeros((n, n), dtype=complex)
        for i, (lam, v) in enumerate(zip(vals, vecs)):
            if not isinstance(lam, (int, float)) or isinstance(lam, bool):
                raise ValidationError(f"W.eigenvalues[{i}]", "expected a real number")
            v = decode_vector(v, f"W.eigenvectors[{i}]")
            if v.shape[0] != n:
                raise ValidationError(f"W.eigenvectors[{i}]", f"expected length {n}")
            nv = np.linalg.norm(v)
            if nv == 0:
                raise ValidationError(f"W.eigenvectors[{i}]", "zero vector")
            v = v / nv
            W += float(lam) * np.outer(v, v.conj())
        return W
    return decode_matrix(raw, "W", n)


def parse_config(data: dict) -> AnalysisConfig:
    """Validate an already-decoded JSON object."""
    if not isinstance(data, dict):
        raise ValidationError("", "config must be a JSON object")
    known = {"name", "dimension", "W", "rule", "bub", "checks", "seed", "tolerances", "samples"}
    extra = sorted(set(data) - known)
    if extra:
        raise ValidationError(extra[0], "unknown field")

    n = data.get("dimension")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ValidationError("dimension", "expected a positive integer")
    rule = data.get("rule")
    if rule not in RULES:
        raise ValidationError("rule", f"expected one of {', '.join(RULES)}")

    psi = R = None
    if rule == "bub":
        bub = data.get("bub")
        if not isinstance(bub, dict):
            raise ValidationError("bub", "the bub rule needs a 'bub' object with psi and R")
        if "psi" not in bub:
            raise ValidationError("bub.psi", "missing")
        if "R" not in bub:
            raise ValidationError("bub.R", "missing")
        psi = decode_vector(bub["psi"], "bub.psi")
        if psi.shape[0] != n:
            raise ValidationError("bub.psi", f"expected length {n}")
        R = decode_matrix(bub["R"], "bub.R", n)

    if "W" in data:
        W = _read_W(data["W"], n)
    elif rule == "bub":
        W = np.outer(psi, psi.conj())
    else:
        raise ValidationError("W", "missing")

    checks = data.get("checks", list(CHECKS))
    if not isinstance(checks, list) or not all(c in CHECKS for c in checks):
        raise ValidationError("checks", f"expected a list drawn from {', '.join(CHECKS)}")
    checks = tuple(c for c in CHECKS if c in checks)

    seed = data.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        raise ValidationError("seed", "expected an unsigned integer")

    tol_raw = data.get("tolerances", {})
    if not isinstance(tol_raw, dict) or set(tol_raw) - {"atol", "eig_cluster_tol", "max_iter"}:
        raise ValidationError("tolerances", "allowed keys are atol, eig_cluster_tol, max_iter")
    try:
        tol = ToleranceContext(**tol_raw)
    except (TypeError, ValueError) as exc:
        raise ValidationError("tolerances", str(exc)) from exc

    samples = dict(DEFAULT_SAMPLES)
    s_raw = data.get("samples", {})
    if not isinstance(s_raw, dict):
        raise ValidationError("samples", "expected an object")
    for k, v in s_raw.items():
        if k not in DEFAULT_SAMPLES:
            raise ValidationError(f"samples.{k}", "unknown sample count")
        if not isinstance(v, int) or isinstance(v, bool) or v < 1:
            raise ValidationError(f"samples.{k}", "expected a positive integer")
        samples[k] = v

    name = data.get("name", "")
    if not isinstance(name, str):
        raise ValidationError("name", "expected a string")

    cfg = AnalysisConfig(n, W, rule, checks, seed, tol, samples, psi, R, name)
    _validate_state(cfg)
    return cfg


def load_config(source) -> AnalysisConfig:
    """Load from a path, or from JSON text when ``source`` is a string starting with '{'."""
    if isinstance(source, dict):
        return parse_config(source)
    if isinstance(source, str) and source.lstrip().startswith("{"):
        text = source
    else:
        try:
            text = Path(source).read_text(encoding="utf-8")
        except OSError as exc:
            raise ParseError(f"cannot read config: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return parse_config(data)
