"""Permutation-invariant graph distances, family experiments and vendored SRG fixtures."""

from __future__ import annotations

import csv
import hashlib
import io
import itertools
import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Any, Optional, Sequence

import numpy as np

from .graphcore import Graph, SrgParams, read_graph6_lines, validate_srg
from .groundstate import gs_correlation, ising_ground_manifold
from .isingcf import IsingModel, PulseSchedule, correlation_closed_form, srg_two_value_decompose
from .walks import InitSpec, rrwp, xy2_correlations

ZERO_THRESHOLD = 1e-8

FIXTURES = {
    "srg16": "srg_16_6_2_2.g6",
    "srg25": "srg_25_12_5_6.g6",
    "srg26": "srg_26_10_3_4.g6",
}

# default two-layer schedule for simulated Ising encodings
DEFAULT_P2_SCHEDULE = {"theta": [np.pi / 4, np.pi / 3], "times": [1.0, 0.7]}


def sort_flatten(c) -> np.ndarray:
    """All ``n^2`` entries in ascending order."""
    return np.sort(np.asarray(c, dtype=np.float64), axis=None)


def graph_distance(c1, c2) -> float:
    """Half the l1 distance between sort-flattened matrices."""
    c1, c2 = np.asarray(c1), np.asarray(c2)
    if c1.shape != c2.shape:
        raise ValueError(f"shape mismatch {c1.shape} vs {c2.shape}")
    return float(0.5 * np.abs(sort_flatten(c1) - sort_flatten(c2)).sum())


# -- encoders --------------------------------------------------------------------

ENCODERS = ("xy2", "ising-p1", "ising-sim", "gs-corr", "rrwp-slice")

_DEFAULTS: dict[str, dict[str, Any]] = {
    "xy2": {"t": 1.0, "init": "all_localized"},
    "ising-p1": {"theta": np.pi / 4, "t": 1.0, "field": 1.0},
    "ising-sim": {**DEFAULT_P2_SCHEDULE, "field": 1.0},
    "gs-corr": {"delta": 0.5},
    "rrwp-slice": {"k": 1},
}


@dataclass(frozen=True)
class EncoderConfig:
    """Encoder name plus parameters; missing parameters take documented defaults."""

    name: str
    params: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.name not in ENCODERS:
            raise ValueError(f"unknown encoder {self.name!r}; expected one of {ENCODERS}")
        merged = dict(_DEFAULTS[self.name])
        unknown = set(self.params) - set(merged)
        if unknown:
            raise ValueError(f"encoder {self.name} does not take {sorted(unknown)}")
        merged.update(self.params)
        object.__setattr__(self, "params", merged)

    @classmethod
    def from_params(cls, name: str, params: dict) -> "EncoderConfig":
        """Build a config keeping only the parameters ``name`` understands."""
        known = _DEFAULTS.get(name, {})
        return cls(name, {k: v for k, v in params.items() if k in known})

    def to_dict(self) -> dict:
        params = {k: (list(map(float, v)) if isinstance(v, (list, tuple)) else v) for k, v in self.params.items()}
        return {"name": self.name, "params": params}


def encode(g: Graph, cfg: EncoderConfig) -> np.ndarray:
    """Node-pair matrix of ``g`` under the configured encoder."""
    p = cfg.params
    if cfg.name == "xy2":
        return xy2_correlations(g, float(p["t"]), InitSpec.parse(str(p["init"])))
    if cfg.name == "ising-p1":
        m = IsingModel.uniform(g, float(p["field"]))
        return correlation_closed_form(g, m, float(p["theta"]), float(p["t"]))
    if cfg.name == "ising-sim":
        from .simulator import correlation_sim

        m = IsingModel.uniform(g, float(p["field"]))
        return correlation_sim(g, m, PulseSchedule(tuple(p["theta"]), tuple(p["times"])))
    if cfg.name == "gs-corr":
        return gs_correlation(ising_ground_manifold(g, float(p["delta"])))
    k = int(p["k"])
    return rrwp(g, k + 1).values[k]


# -- reports ---------------------------------------------------------------------


@dataclass
class DistanceReport:
    family: str
    distances: np.ndarray
    encoder: dict
    threshold: float = ZERO_THRESHOLD
    normalized: Optional[np.ndarray] = None

    @property
    def size(self) -> int:
        return self.distances.shape[0]

    def pairs(self) -> list[tuple[int, int, float]]:
        return [(i, j, float(self.distances[i, j])) for i, j in itertools.combinations(range(self.size), 2)]

    def off_diagonal(self) -> np.ndarray:
        return self.distances[np.triu_indices(self.size, 1)]

    def to_dict(self) -> dict:
        out = {
            "family": self.family,
            "encoder": self.encoder,
            "threshold": self.threshold,
            "shape": list(self.distances.shape),
            "distances": self.distances.ravel().tolist(),
        }
        if self.normalized is not None:
            out["normalized"] = self.normalized.ravel().tolist()
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        header = ["family", "i", "j", "distance"] + (["normalized"] if self.normalized is not None else [])
        w.writerow(header)
        for i, j, d in self.pairs():
            row = [self.family, i, j, format_float(d)]
            if self.normalized is not None:
                row.append(format_float(self.normalized[i, j]))
            w.writerow(row)
        return buf.getvalue()


def format_float(x: float) -> str:
    return format(float(x), ".17g")


def min_max_normalize(d: np.ndarray) -> np.ndarray:
    """Scale off-diagonal entries to [0, 1]; a constant matrix maps to zeros."""
    n = d.shape[0]
    off = ~np.eye(n, dtype=bool)
    out = np.zeros_like(d, dtype=np.float64)
    if n < 2:
        return out
    lo, hi = d[off].min(), d[off].max()
    if hi > lo:
        out[off] = (d[off] - lo) / (hi - lo)
    return out


def family_distance_matrix(
    graphs: Sequence[Graph],
    encoder: EncoderConfig,
    family: str = "",
    normalize: bool = False,
) -> DistanceReport:
    if not graphs:
        raise ValueError("empty family")
    sizes = {g.n for g in graphs}
    if len(sizes) != 1:
        raise ValueError(f"family mixes node counts {sorted(sizes)}")
    enc = [encode(g, encoder) for g in graphs]
    m = len(graphs)
    d = np.zeros((m, m))
    for i, j in itertools.combinations(range(m), 2):
        d[i, j] = d[j, i] = graph_distance(enc[i], enc[j])
    return DistanceReport(family, d, encoder.to_dict(), ZERO_THRESHOLD, min_max_normalize(d) if normalize else None)


def family_params(graphs: Sequence[Graph]) -> SrgParams:
    params = [validate_srg(g) for g in graphs]
    for i, p in enumerate(params):
        if p is None:
            raise ValueError(f"graph {i} is not strongly regular")
    if len(set(params)) != 1:
        raise ValueError(f"parameter mismatch within family: {sorted(set(params))}")
    return params[0]


def srg_family_report(graphs: Sequence[Graph], family: str = "", xy2: Optional[EncoderConfig] = None) -> dict:
    """Run the standard battery on a same-parameter SRG family."""
    from .wltest import gdwl, wl1, wl1_fingerprint

    if len(graphs) < 2:
        raise ValueError("need at least two graphs")
    params = family_params(graphs)
    m = len(graphs)

    wl_classes = [wl1(g).num_classes for g in graphs]
    wl_fp = {wl1_fingerprint(g) for g in graphs}
    rrwp_fp = {gdwl(g, rrwp(g, 8).values) for g in graphs}

    ising_cfg = EncoderConfig("ising-p1")
    ising = family_distance_matrix(graphs, ising_cfg, family)
    two_value = [bool(srg_two_value_decompose(encode(g, ising_cfg), g)) for g in graphs]
    xy = family_distance_matrix(graphs, xy2 or EncoderConfig("xy2"), family)

    def summary(rep: DistanceReport) -> dict:
        off = rep.off_diagonal()
        return {
            "encoder": rep.encoder,
            "min": float(off.min()),
            "max": float(off.max()),
            "pairs_above_threshold": int((off > ZERO_THRESHOLD).sum()),
            "distances": rep.distances.ravel().tolist(),
        }

    return {
        "family": family,
        "params": list(params),
        "graphs": m,
        "pairs": m * (m - 1) // 2,
        "verdicts": {
            "wl1": {
                "single_class_each": all(c == 1 for c in wl_classes),
                "distinguished": len(wl_fp) > 1,
            },
            "gdwl-rrwp": {"distinguished": len(rrwp_fp) > 1},
            "ising-p1": {**summary(ising), "two_value_all": all(two_value), "distinguished": bool((ising.off_diagonal() > ZERO_THRESHOLD).any())},
            "xy2": {**summary(xy), "all_pairs_distinguished": bool((xy.off_diagonal() > ZERO_THRESHOLD).all())},
        },
    }


# -- fixtures --------------------------------------------------------------------


def _data_text(filename: str) -> str:
    return resources.files("qpe").joinpath("data", filename).read_text(encoding="ascii")


def fixture_checksums() -> dict[str, str]:
    out = {}
    for line in _data_text("SHA256SUMS").splitlines():
        if line.strip():
            digest, name = line.split()
            out[name] = digest
    return out


def load_fixture(name: str, verify: bool = True) -> list[Graph]:
    """Vendored family by key (``srg16``, ``srg25``, ``srg26``) or file name."""
    filename = FIXTURES.get(name, name)
    text = _data_text(filename)
    if verify:
        expected = fixture_checksums().get(filename)
        actual = hashlib.sha256(text.encode("ascii")).hexdigest()
        if expected != actual:
            raise ValueError(f"checksum mismatch for {filename}")
    return read_graph6_lines(text.splitlines())


def dumps_json(obj: Any, indent: int = 2) -> str:
    """Deterministic JSON; floats are written with 17 significant digits."""

    def emit(x, level: int) -> str:
        pad = " " * (indent * (level + 1))
        end = " " * (indent * level)
        if isinstance(x, dict):
            if not x:
                return "{}"
            items = [f"{pad}{json.dumps(str(k))}: {emit(v, level + 1)}" for k, v in x.items()]
            return "{\n" + ",\n".join(items) + "\n" + end + "}"
        if isinstance(x, np.ndarray):
            x = x.tolist()
        if isinstance(x, (list, tuple)):
            if not x:
                return "[]"
            if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in x):
                return "[" + ", ".join(emit(v, level + 1) for v in x) + "]"
            return "[\n" + ",\n".join(pad + emit(v, level + 1) for v in x) + "\n" + end + "]"
        if x is None or isinstance(x, (bool, np.bool_)):
            return json.dumps(None if x is None else bool(x))
        if isinstance(x, (int, np.integer)):
            return str(int(x))
        if isinstance(x, (float, np.floating)):
            if not np.isfinite(x):
                raise ValueError("non-finite value in output")
            return format_float(x)
        return json.dumps(x)

    return emit(obj, 0) + "\n"
