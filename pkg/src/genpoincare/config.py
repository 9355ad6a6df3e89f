"""JSON operator configuration files."""

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import List, Optional

import numpy as np

from .complexes import ComplexSpec
from .poincare import DEFAULT_ENSEMBLE, default_bandwidth, default_grid_size
from .symbol import Operator

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    pass


@dataclass
class OperatorConfig:
    name: str
    n: int
    dim_u: int
    dim_v: int
    matrices: list
    q_matrices: Optional[list] = None
    dim_w: Optional[int] = None
    grid_size: int = 0
    bandwidth: int = 0
    ensemble_size: int = DEFAULT_ENSEMBLE
    seed: int = 0
    p: List[float] = field(default_factory=lambda: [2.0])

    @property
    def operator(self) -> Operator:
        return Operator(np.array(self.matrices, dtype=np.float64), name=self.name)

    @property
    def has_q(self) -> bool:
        return self.q_matrices is not None

    @property
    def complex_spec(self) -> ComplexSpec:
        if self.q_matrices is None:
            raise ConfigError(f"config {self.name!r} defines no q_matrices")
        return ComplexSpec(self.operator, Operator(np.array(self.q_matrices, dtype=np.float64),
                                                   name=f"{self.name}:Q"))


def _require(doc, key, kind):
    if key not in doc:
        raise ConfigError(f"missing required field {key!r}")
    value = doc[key]
    if kind is int and (isinstance(value, bool) or not isinstance(value, int)):
        raise ConfigError(f"field {key!r} must be an integer, got {value!r}")
    if kind is str and not isinstance(value, str):
        raise ConfigError(f"field {key!r} must be a string, got {value!r}")
    return value


def _check_matrices(mats, n, rows, cols, key):
    if not isinstance(mats, list) or len(mats) != n:
        raise ConfigError(f"{key!r} must list exactly n={n} matrices")
    for idx, m in enumerate(mats):
        if not isinstance(m, list) or len(m) != rows:
            raise ConfigError(f"{key}[{idx}] must have {rows} rows")
        for r, row in enumerate(m):
            if not isinstance(row, list) or len(row) != cols:
                raise ConfigError(f"{key}[{idx}][{r}] must have {cols} entries")
            for v in row:
                if isinstance(v, bool) or not isinstance(v, (int, float)) or not np.isfinite(v):
                    raise ConfigError(f"{key}[{idx}][{r}] has a non-numeric entry {v!r}")


def parse_config(doc) -> OperatorConfig:
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    name = _require(doc, "name", str)
    n = _require(doc, "n", int)
    dim_u = _require(doc, "dim_u", int)
    dim_v = _require(doc, "dim_v", int)
    if min(n, dim_u, dim_v) < 1:
        raise ConfigError("n, dim_u and dim_v must be positive")
    matrices = _require(doc, "matrices", list)
    _check_matrices(matrices, n, dim_v, dim_u, "matrices")

    q_matrices = doc.get("q_matrices")
    dim_w = doc.get("dim_w")
    if q_matrices is not None:
        dim_w = _require(doc, "dim_w", int)
        if dim_w < 1:
            raise ConfigError("dim_w must be positive")
        _check_matrices(q_matrices, n, dim_w, dim_v, "q_matrices")
    elif dim_w is not None and (isinstance(dim_w, bool) or not isinstance(dim_w, int) or dim_w < 1):
        raise ConfigError("dim_w must be a positive integer")

    grid = doc.get("grid", {})
    if not isinstance(grid, dict):
        raise ConfigError("grid must be an object")
    size = grid.get("N", default_grid_size(n))
    if isinstance(size, bool) or not isinstance(size, int) or size < 3 or size % 2 == 0:
        raise ConfigError(f"grid.N must be an odd integer >= 3, got {size!r}")
    bandwidth = grid.get("bandwidth", default_bandwidth(size))
    if isinstance(bandwidth, bool) or not isinstance(bandwidth, int):
        raise ConfigError("grid.bandwidth must be an integer")
    if not 1 <= bandwidth <= (size - 1) // 2:
        raise ConfigError(
            f"grid.bandwidth must lie in [1, {(size - 1) // 2}], got {bandwidth} "
            "(bandwidth 0 leaves only kernel fields)"
        )

    ens = doc.get("ensemble", {})
    if not isinstance(ens, dict):
        raise ConfigError("ensemble must be an object")
    ens_size = ens.get("size", DEFAULT_ENSEMBLE)
    seed = ens.get("seed", 0)
    for key, value in (("ensemble.size", ens_size), ("ensemble.seed", seed)):
        if isinstance(value, bool) or not isinstance(value, int) or value < 0:
            raise ConfigError(f"{key} must be a non-negative integer")
    if ens_size < 1:
        raise ConfigError("ensemble.size must be positive")

    p = doc.get("p", [2.0])
    if not isinstance(p, list) or not p:
        raise ConfigError("p must be a non-empty list of exponents")
    for v in p:
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not (1.0 < v < float("inf")):
            raise ConfigError(f"every exponent must satisfy 1 < p < inf, got {v!r}")

    return OperatorConfig(
        name=name, n=n, dim_u=dim_u, dim_v=dim_v, matrices=matrices,
        q_matrices=q_matrices, dim_w=dim_w, grid_size=size, bandwidth=bandwidth,
        ensemble_size=ens_size, seed=seed, p=[float(v) for v in p],
    )


def load_config(path) -> OperatorConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return parse_config(doc)


def bundled_configs():
    """Names of the example configs shipped with the package."""
    root = resources.files("genpoincare") / "configs"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def bundled_config_path(name: str):
    return resources.files("genpoincare") / "configs" / f"{name}.json"
