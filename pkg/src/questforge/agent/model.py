"""Actor-critic network: parameters, forward pass, action selection."""

from __future__ import annotations

import base64
import json
from dataclasses import dataclass

import numpy as np

from . import gru
from .vocab import Vocab

# Channel order is part of the model definition: the state vector is the
# concatenation of these encodings, and saved checkpoints depend on it.
CHANNELS = ("observation", "inventory", "room", "action")

DEFAULT_D_EMB = 32
DEFAULT_D_HIDDEN = 96


@dataclass
class AgentParams:
    vocab: Vocab
    d_emb: int
    d_hidden: int
    arrays: dict

    def copy(self) -> "AgentParams":
        return AgentParams(
            vocab=self.vocab,
            d_emb=self.d_emb,
            d_hidden=self.d_hidden,
            arrays={k: v.copy() for k, v in self.arrays.items()},
        )

    def channel_weights(self, channel: str) -> dict:
        return {key: self.arrays[f"{channel}.{key}"] for key in gru.WEIGHT_KEYS}


def init_params(vocab: Vocab, d_emb: int = DEFAULT_D_EMB,
                d_hidden: int = DEFAULT_D_HIDDEN, seed: int = 0) -> AgentParams:
    rng = np.random.default_rng(seed)
    arrays = {"emb": rng.uniform(-0.1, 0.1, size=(len(vocab), d_emb))}
    for channel in CHANNELS:
        for key, value in gru.init_weights(d_emb, d_hidden, rng).items():
            arrays[f"{channel}.{key}"] = value
    state_dim = 4 * d_hidden
    scale = 1.0 / np.sqrt(state_dim)
    arrays["W_score"] = rng.uniform(-scale, scale, size=(d_hidden, state_dim))
    arrays["w_value"] = rng.uniform(-scale, scale, size=state_dim)
    arrays["b_value"] = np.zeros(1)
    return AgentParams(vocab=vocab, d_emb=d_emb, d_hidden=d_hidden, arrays=arrays)


def param_count(params: AgentParams) -> int:
    return sum(arr.size for arr in params.arrays.values())


def zero_grads(params: AgentParams) -> dict:
    return {k: np.zeros_like(v) for k, v in params.arrays.items()}


# --- sequence encoding -----------------------------------------------------

def pack_sequences(seqs) -> tuple[np.ndarray, np.ndarray]:
    """Right-pad integer id sequences into (ids, mask) arrays."""
    batch = len(seqs)
    length = max((len(s) for s in seqs), default=0) or 1
    ids = np.zeros((batch, length), dtype=np.intp)
    mask = np.zeros((batch, length))
    for i, seq in enumerate(seqs):
        if seq:
            ids[i, :len(seq)] = seq
            mask[i, :len(seq)] = 1.0
    return ids, mask


def encode_batch(params: AgentParams, channel: str, seqs):
    """Encode a batch of token-id sequences; empty sequences give zeros."""
    ids, mask = pack_sequences(seqs)
    x = params.arrays["emb"][ids]
    h, cache = gru.forward(x, mask, params.channel_weights(channel))
    return h, (channel, ids, cache)


def encode_batch_backward(dh: np.ndarray, enc_cache, grads: dict) -> None:
    channel, ids, cache = enc_cache
    w_grads, dx = gru.backward(dh, cache)
    for key, grad in w_grads.items():
        grads[f"{channel}.{key}"] += grad
    np.add.at(grads["emb"], ids, dx)


def encode_one(params: AgentParams, channel: str, seq, cache: dict | None = None):
    """Single-sequence encoding with optional memoization.

    The cache is only valid while the parameters stay fixed; callers clear
    it after every update.
    """
    if cache is not None:
        key = (channel, seq)
        hit = cache.get(key)
        if hit is not None:
            return hit
    h, _ = encode_batch(params, channel, [seq])
    h = h[0]
    if cache is not None:
        cache[(channel, seq)] = h
    return h


# --- policy head -----------------------------------------------------------

def softmax(scores: np.ndarray) -> np.ndarray:
    shifted = scores - scores.max()
    ex = np.exp(shifted)
    return ex / ex.sum()


def policy_forward(params: AgentParams, obs_ids, inv_ids, room_ids,
                   action_id_lists, cache: dict | None = None):
    """Distribution over admissible actions plus the state value.

    Returns (pi, value, state) where state is the concatenated channel
    encoding the heads were computed from.
    """
    if not action_id_lists:
        raise ValueError("at least one admissible action is required")
    h_obs = encode_one(params, "observation", obs_ids, cache)
    h_inv = encode_one(params, "inventory", inv_ids, cache)
    h_room = encode_one(params, "room", room_ids, cache)
    if cache is not None:
        g = np.stack([encode_one(params, "action", seq, cache)
                      for seq in action_id_lists])
    else:
        g, _ = encode_batch(params, "action", list(action_id_lists))
    state = np.concatenate([h_obs, h_inv, h_room, g.mean(axis=0)])
    q = params.arrays["W_score"] @ state
    pi = softmax(g @ q)
    value = float(params.arrays["w_value"] @ state + params.arrays["b_value"][0])
    return pi, value, state


def select_action(params: AgentParams, feedback: str, inventory: str, room: str,
                  admissible, rng: np.random.Generator | None = None,
                  mode: str = "sample", cache: dict | None = None):
    """Pick one admissible command; returns (index, log_prob, value).

    Greedy mode breaks ties toward the lowest index so evaluation is
    deterministic.
    """
    if mode not in ("sample", "greedy"):
        raise ValueError(f"unknown mode: {mode}")
    if mode == "sample" and rng is None:
        raise ValueError("sampling requires an rng")
    vocab = params.vocab
    pi, value, _ = policy_forward(
        params,
        vocab.encode(feedback),
        vocab.encode(inventory),
        vocab.encode(room),
        [vocab.encode(a) for a in admissible],
        cache,
    )
    if mode == "greedy":
        index = int(np.argmax(pi))
    else:
        index = int(rng.choice(len(pi), p=pi / pi.sum()))
    return index, float(np.log(pi[index])), value


def random_policy(admissible, rng: np.random.Generator) -> int:
    """Uniform baseline over the admissible set."""
    if not admissible:
        raise ValueError("admissible set is empty")
    return int(rng.integers(len(admissible)))


# --- persistence -----------------------------------------------------------

_FORMAT = "questforge-agent-v1"


def save_params(params: AgentParams, path) -> None:
    """Serialize to canonical JSON; identical params give identical bytes."""
    arrays = {}
    for name, arr in params.arrays.items():
        data = np.ascontiguousarray(arr, dtype="<f8")
        arrays[name] = {
            "shape": list(arr.shape),
            "data": base64.b64encode(data.tobytes()).decode("ascii"),
        }
    doc = {
        "format": _FORMAT,
        "d_emb": params.d_emb,
        "d_hidden": params.d_hidden,
        "vocab": list(params.vocab.tokens),
        "arrays": arrays,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")


def load_params(path) -> AgentParams:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("format") != _FORMAT:
        raise ValueError(f"not an agent checkpoint: {path}")
    arrays = {}
    for name, entry in doc["arrays"].items():
        flat = np.frombuffer(base64.b64decode(entry["data"]), dtype="<f8")
        arrays[name] = flat.reshape(entry["shape"]).astype(np.float64)
    return AgentParams(
        vocab=Vocab(tuple(doc["vocab"])),
        d_emb=doc["d_emb"],
        d_hidden=doc["d_hidden"],
        arrays=arrays,
    )


def flatten_arrays(arrays: dict) -> np.ndarray:
    return np.concatenate([arrays[name].ravel() for name in sorted(arrays)])


def assign_flat(arrays: dict, flat: np.ndarray) -> None:
    offset = 0
    for name in sorted(arrays):
        arr = arrays[name]
        arr[...] = flat[offset:offset + arr.size].reshape(arr.shape)
        offset += arr.size
    if offset != flat.size:
        raise ValueError("flat vector length does not match parameters")
