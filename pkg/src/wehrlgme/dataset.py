"""Random-state dataset generation, spin dynamics, and JSONL persistence.

Four subsets:

- uniform: N independent area-uniform Majorana points;
- degenerate: a uniformly drawn partition of N sets point multiplicities;
- ghz_dicke: normalized alpha|GHZ> + (1-alpha)|D_N^(k)>;
- squeezed: trajectories of |D_N^(0)> under H = chi_x Jx^2 + chi_y Jy^2
  + chi_z Jz^2, sampled every step (dynamics by one eigendecomposition,
  exact for the time-independent H).

Every record stores the Dicke vector, moments up to q_max, ratios, and
the reference GME. All randomness flows from one root seed through named
substreams keyed by (stream, subset, record); parallel and serial
generation would therefore produce identical datasets.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import SchemaError
from .gme import gme_reference
from .moments import MomentSequence, moments_dicke
from .states import (BlochDirection, MajoranaConstellation, SymmetricState,
                     dicke_state, from_majorana, ghz_state)

SCHEMA_VERSION = 1
DEFAULT_Q_MAX = 8
SUBSETS = ("uniform", "degenerate", "ghz_dicke", "squeezed")

# substream ids for SeedSequence spawn keys
STREAM_DATASET = 0
STREAM_SPLIT = 1
STREAM_INIT = 2
STREAM_SHUFFLE = 3

_RECORD_FIELDS = ("id", "n_qubits", "subset", "params", "dicke_re",
                  "dicke_im", "moments", "ratios", "gme")


@dataclass(frozen=True)
class DatasetRecord:
    """One generated state with its moments and reference GME."""

    id: int
    n_qubits: int
    subset: str
    params: dict
    dicke: np.ndarray = field(repr=False)
    moments: MomentSequence = field(repr=False)
    gme: float = 0.0

    def to_json_dict(self) -> dict:
        return {
            "id": self.id,
            "n_qubits": self.n_qubits,
            "subset": self.subset,
            "params": self.params,
            "dicke_re": self.dicke.real.tolist(),
            "dicke_im": self.dicke.imag.tolist(),
            "moments": self.moments.moments.tolist(),
            "ratios": self.moments.ratios.tolist(),
            "gme": self.gme,
        }

    @staticmethod
    def from_json_dict(obj: dict) -> "DatasetRecord":
        missing = [k for k in _RECORD_FIELDS if k not in obj]
        if missing:
            raise SchemaError(f"record missing fields {missing}")
        dicke = np.asarray(obj["dicke_re"], dtype=np.float64) \
            + 1j * np.asarray(obj["dicke_im"], dtype=np.float64)
        n = obj["n_qubits"]
        seq = MomentSequence(n, len(obj["moments"]),
                             np.asarray(obj["moments"]),
                             np.asarray(obj["ratios"]))
        return DatasetRecord(id=obj["id"], n_qubits=n, subset=obj["subset"],
                             params=obj["params"], dicke=dicke, moments=seq,
                             gme=float(obj["gme"]))


def substream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for a named point in the run tree."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


def _record(rec_id: int, n: int, subset: str, params: dict,
            state: SymmetricState, q_max: int) -> DatasetRecord:
    seq = moments_dicke(state, q_max)
    ref = gme_reference(state)
    return DatasetRecord(id=rec_id, n_qubits=n, subset=subset, params=params,
                         dicke=state.dicke, moments=seq, gme=ref.value)


def _uniform_points(rng: np.random.Generator, count: int):
    cost = rng.uniform(-1.0, 1.0, count)
    phi = rng.uniform(0.0, 2.0 * math.pi, count)
    return [BlochDirection(math.acos(c), p) for c, p in zip(cost, phi)]


def gen_uniform(n_states: int, n_qubits: int, seed: int,
                q_max: int = DEFAULT_Q_MAX, id_base: int = 0):
    """Subset 1: independent uniform Majorana points."""
    out = []
    for i in range(n_states):
        rng = substream(seed, STREAM_DATASET, 0, i)
        state = from_majorana(MajoranaConstellation(
            tuple(_uniform_points(rng, n_qubits))))
        out.append(_record(id_base + i, n_qubits, "uniform", {}, state, q_max))
    return out


def partitions(n: int) -> list[tuple[int, ...]]:
    """All integer partitions of n, decreasing parts, lexicographic order."""
    if n == 0:
        return [()]
    out = []

    def rec(remaining, cap, prefix):
        if remaining == 0:
            out.append(tuple(prefix))
            return
        for part in range(min(remaining, cap), 0, -1):
            rec(remaining - part, part, prefix + [part])

    rec(n, n, [])
    return out


def gen_degenerate(n_states: int, n_qubits: int, seed: int,
                   q_max: int = DEFAULT_Q_MAX, id_base: int = 0):
    """Subset 2: degenerate Majorana points with a random partition of N."""
    parts = partitions(n_qubits)
    out = []
    for i in range(n_states):
        rng = substream(seed, STREAM_DATASET, 1, i)
        part = parts[rng.integers(len(parts))]
        distinct = _uniform_points(rng, len(part))
        pts = []
        for mult, p in zip(part, distinct):
            pts.extend([p] * mult)
        state = from_majorana(MajoranaConstellation(tuple(pts)))
        out.append(_record(id_base + i, n_qubits, "degenerate",
                           {"partition": list(part)}, state, q_max))
    return out


def ghz_dicke_superposition(n: int, alpha: float, k: int) -> SymmetricState:
    """Normalized alpha|GHZ> + (1-alpha)|D_N^(k)>."""
    d = alpha * ghz_state(n).dicke + (1.0 - alpha) * dicke_state(n, k).dicke
    return SymmetricState.from_dicke(d)


def gen_ghz_dicke(n_states: int, n_qubits: int, seed: int,
                  q_max: int = DEFAULT_Q_MAX, id_base: int = 0):
    """Subset 3: GHZ/Dicke superpositions with random alpha and k."""
    out = []
    for i in range(n_states):
        rng = substream(seed, STREAM_DATASET, 2, i)
        alpha = float(rng.uniform())
        k = int(rng.integers(n_qubits + 1))
        state = ghz_dicke_superposition(n_qubits, alpha, k)
        out.append(_record(id_base + i, n_qubits, "ghz_dicke",
                           {"alpha": alpha, "k": k}, state, q_max))
    return out


@dataclass(frozen=True)
class SpinOperators:
    """Collective spin matrices in the Dicke basis (j = N/2, m = N/2 - k)."""

    n_qubits: int
    jx: np.ndarray = field(repr=False)
    jy: np.ndarray = field(repr=False)
    jz: np.ndarray = field(repr=False)


def spin_operators(n_qubits: int) -> SpinOperators:
    j = 0.5 * n_qubits
    m = j - np.arange(n_qubits + 1)
    jz = np.diag(m).astype(np.complex128)
    # J+ |j,m> = sqrt(j(j+1) - m(m+1)) |j,m+1>, i.e. k -> k-1
    up = np.sqrt(j * (j + 1) - m[1:] * (m[1:] + 1))
    jp = np.zeros((n_qubits + 1, n_qubits + 1), dtype=np.complex128)
    jp[np.arange(n_qubits), np.arange(1, n_qubits + 1)] = up
    jm = jp.conj().T
    return SpinOperators(n_qubits, 0.5 * (jp + jm), -0.5j * (jp - jm), jz)


def gen_squeezed(n_trajectories: int, n_qubits: int, seed: int,
                 steps: int = 500, dt: float = 0.1,
                 q_max: int = DEFAULT_Q_MAX, id_base: int = 0):
    """Squeezing trajectories from |D_N^(0)>, one record per time step."""
    ops = spin_operators(n_qubits)
    out = []
    rec_id = id_base
    for traj in range(n_trajectories):
        rng = substream(seed, STREAM_DATASET, 3, traj)
        chi = rng.uniform(0.0, 1.0, 3)
        h = chi[0] * ops.jx @ ops.jx + chi[1] * ops.jy @ ops.jy \
            + chi[2] * ops.jz @ ops.jz
        evals, evecs = np.linalg.eigh(h)
        psi0 = evecs.conj().T @ dicke_state(n_qubits, 0).dicke
        for step in range(1, steps + 1):
            t = step * dt
            psi = evecs @ (np.exp(-1j * evals * t) * psi0)
            state = SymmetricState.from_dicke(psi)
            params = {"chi_x": float(chi[0]), "chi_y": float(chi[1]),
                      "chi_z": float(chi[2]), "t": t}
            out.append(_record(rec_id, n_qubits, "squeezed", params,
                               state, q_max))
            rec_id += 1
    return out


_GENERATORS = {
    "uniform": gen_uniform,
    "degenerate": gen_degenerate,
    "ghz_dicke": gen_ghz_dicke,
}


def generate_subsets(sizes: dict, n_qubits: int, seed: int,
                     q_max: int = DEFAULT_Q_MAX):
    """Generate the random-state subsets; ids are contiguous across subsets."""
    records = []
    for name in ("uniform", "degenerate", "ghz_dicke"):
        count = sizes.get(name, 0)
        if count:
            records.extend(_GENERATORS[name](count, n_qubits, seed,
                                             q_max, id_base=len(records)))
    return records


def split_dataset(records, seed: int):
    """Per-subset random half/half split, deterministic under the seed."""
    train, test = [], []
    for s_idx, name in enumerate(SUBSETS):
        group = [r for r in records if r.subset == name]
        if not group:
            continue
        if len(group) % 2:
            raise ValueError(f"subset {name} has odd size {len(group)}")
        rng = substream(seed, STREAM_SPLIT, s_idx)
        order = rng.permutation(len(group))
        half = len(group) // 2
        train.extend(group[i] for i in sorted(order[:half]))
        test.extend(group[i] for i in sorted(order[half:]))
    return train, test


def write_records(path, records) -> None:
    path = Path(path)
    with path.open("w") as fh:
        for rec in records:
            fh.write(json.dumps(rec.to_json_dict()) + "\n")


def read_records(path) -> list:
    path = Path(path)
    out = []
    with path.open() as fh:
        for line in fh:
            if line.strip():
                out.append(DatasetRecord.from_json_dict(json.loads(line)))
    return out


def write_manifest(path, manifest: dict) -> None:
    manifest = dict(manifest)
    manifest["schema_version"] = SCHEMA_VERSION
    Path(path).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def read_manifest(path) -> dict:
    obj = json.loads(Path(path).read_text())
    if obj.get("schema_version") != SCHEMA_VERSION:
        raise SchemaError(f"unsupported schema version {obj.get('schema_version')!r}")
    return obj
