"""Versioned binary checkpoints of an agent's learned state.

Layout (all little-endian): magic 'DSRL', u32 version, then a json-encoded
metadata block (length-prefixed) followed by float64 arrays, each prefixed
by u32 ndim and u64 dims.
"""

import json
import struct

import numpy as np

from . import dsom as dsom_mod
from .errors import InputError
from .nncore import NetworkParams

MAGIC = b"DSRL"
VERSION = 1


def _write_array(f, a):
    a = np.ascontiguousarray(a, dtype="<f8")
    f.write(struct.pack("<I", a.ndim))
    f.write(struct.pack(f"<{a.ndim}Q", *a.shape))
    f.write(a.tobytes())


def _read_array(f):
    (ndim,) = struct.unpack("<I", f.read(4))
    shape = struct.unpack(f"<{ndim}Q", f.read(8 * ndim))
    n = int(np.prod(shape))
    buf = f.read(8 * n)
    if len(buf) != 8 * n:
        raise InputError("truncated checkpoint array")
    return np.frombuffer(buf, dtype="<f8").reshape(shape).copy()


def save(path, agent):
    meta = {
        "algorithm": agent.algorithm,
        "variant": agent.variant,
        "gamma": agent.gamma,
        "optimizer": agent.optimizer.kind,
        "alpha": agent.optimizer.alpha,
    }
    arrays = list(agent.params.arrays())
    if agent.map is not None:
        meta["dsom"] = {"epsilon": agent.map.epsilon, "eta": agent.map.eta,
                        "kappa": agent.map.kappa}
        arrays += [agent.map.vectors, agent.map.positions]
    if agent.target is not None:
        meta["has_target"] = True
        arrays += list(agent.target.arrays())
    opt_state = _optimizer_arrays(agent.optimizer)
    meta["n_opt_arrays"] = len(opt_state)
    if agent.optimizer.kind == "adam":
        meta["adam_t"] = agent.optimizer.t
    arrays += opt_state
    meta["n_arrays"] = len(arrays)
    blob = json.dumps(meta, sort_keys=True).encode()
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<I", VERSION))
        f.write(struct.pack("<I", len(blob)))
        f.write(blob)
        for a in arrays:
            _write_array(f, a)


def _optimizer_arrays(opt):
    if opt.kind == "rmsprop" and opt.sq is not None:
        return list(opt.sq)
    if opt.kind == "adam" and opt.m is not None:
        return list(opt.m) + list(opt.v)
    return []


class Snapshot:
    """Loaded checkpoint, shaped enough like an Agent for the analysis module
    (params, map, state_mask)."""

    def __init__(self, meta, params, map_, target, opt_arrays):
        self.meta = meta
        self.algorithm = meta["algorithm"]
        self.variant = meta["variant"]
        self.params = params
        self.map = map_
        self.target = target
        self.opt_arrays = opt_arrays

    def state_mask(self, v):
        return dsom_mod.mask(self.map, v) if self.map is not None else None


def load(path):
    with open(path, "rb") as f:
        if f.read(4) != MAGIC:
            raise InputError(f"{path}: not a checkpoint file (bad magic)")
        (version,) = struct.unpack("<I", f.read(4))
        if version != VERSION:
            raise InputError(f"{path}: unsupported checkpoint version {version}")
        (n,) = struct.unpack("<I", f.read(4))
        meta = json.loads(f.read(n).decode())
        arrays = [_read_array(f) for _ in range(meta["n_arrays"])]
    params = NetworkParams(*arrays[:4])
    pos = 4
    map_ = None
    if "dsom" in meta:
        dm = meta["dsom"]
        map_ = dsom_mod.DsomMap(arrays[pos], arrays[pos + 1],
                                dm["epsilon"], dm["eta"], dm["kappa"])
        pos += 2
    target = None
    if meta.get("has_target"):
        target = NetworkParams(*arrays[pos:pos + 4])
        pos += 4
    return Snapshot(meta, params, map_, target, arrays[pos:])
