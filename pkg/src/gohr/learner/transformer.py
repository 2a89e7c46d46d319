"""Transformer policy and critic networks over FC/OC encoded inputs.

The FC input vector is chunked into fixed-width tokens (width 144, so a
2880-dim input gives 20 tokens); the OC tensor contributes one token per
object row per slab. Policy and critic are two separate networks. Policy
heads are zero-initialized so an untrained net is uniform over unmasked
actions. The OC policy head reads per-object logits off the current-slab
tokens, which keeps the network permutation-equivariant over objects.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import autodiff as ad
from .autodiff import Tensor


@dataclass(frozen=True)
class TransformerConfig:
    d_model: int = 64
    n_heads: int = 4
    n_layers: int = 2
    d_ff: int = 128

    def __post_init__(self):
        if self.d_model % self.n_heads:
            raise ValueError("d_model must be divisible by n_heads")


FC_TOKEN_WIDTH = 144


class Module:
    """Tiny parameter-registry base."""

    def __init__(self):
        self._params: list[tuple[str, Tensor]] = []

    def _register(self, name: str, value: np.ndarray) -> Tensor:
        t = Tensor.param(value)
        self._params.append((name, t))
        return t

    def _adopt(self, prefix: str, child: "Module"):
        self._params.extend((f"{prefix}.{n}", t) for n, t in child._params)

    def parameters(self) -> list[tuple[str, Tensor]]:
        return list(self._params)

    def zero_grad(self):
        for _, t in self._params:
            t.grad = None

    def state_dict(self) -> dict:
        return {n: t.data.copy() for n, t in self._params}

    def load_state_dict(self, state: dict):
        for n, t in self._params:
            if t.data.shape != state[n].shape:
                raise ValueError(f"shape mismatch for {n}")
            t.data[...] = state[n]


class Linear(Module):
    def __init__(self, d_in: int, d_out: int, rng: np.random.Generator, zero_init: bool = False):
        super().__init__()
        w = np.zeros((d_in, d_out)) if zero_init else rng.normal(0.0, d_in ** -0.5, (d_in, d_out))
        self.w = self._register("w", w)
        self.b = self._register("b", np.zeros(d_out))

    def __call__(self, x: Tensor) -> Tensor:
        return ad.add(ad.matmul(x, self.w), self.b)


class LayerNorm(Module):
    def __init__(self, d: int):
        super().__init__()
        self.gain = self._register("gain", np.ones(d))
        self.bias = self._register("bias", np.zeros(d))

    def __call__(self, x: Tensor) -> Tensor:
        return ad.layernorm(x, self.gain, self.bias)


class SelfAttention(Module):
    def __init__(self, cfg: TransformerConfig, rng: np.random.Generator):
        super().__init__()
        d = cfg.d_model
        self.n_heads = cfg.n_heads
        self.d_head = d // cfg.n_heads
        for name in ("wq", "wk", "wv", "wo"):
            setattr(self, name, Linear(d, d, rng))
            self._adopt(name, getattr(self, name))

    def __call__(self, x: Tensor) -> Tensor:
        q, k, v = self.wq(x), self.wk(x), self.wv(x)
        outs = []
        inv = self.d_head ** -0.5
        for h in range(self.n_heads):
            lo, hi = h * self.d_head, (h + 1) * self.d_head
            qh, kh, vh = ad.cols(q, lo, hi), ad.cols(k, lo, hi), ad.cols(v, lo, hi)
            scores = ad.scale(ad.matmul(qh, ad.transpose(kh)), inv)
            outs.append(ad.matmul(ad.softmax_rows(scores), vh))
        return self.wo(ad.concat_cols(outs))


class Block(Module):
    def __init__(self, cfg: TransformerConfig, rng: np.random.Generator):
        super().__init__()
        self.ln1 = LayerNorm(cfg.d_model)
        self.attn = SelfAttention(cfg, rng)
        self.ln2 = LayerNorm(cfg.d_model)
        self.ff1 = Linear(cfg.d_model, cfg.d_ff, rng)
        self.ff2 = Linear(cfg.d_ff, cfg.d_model, rng)
        for name in ("ln1", "attn", "ln2", "ff1", "ff2"):
            self._adopt(name, getattr(self, name))

    def __call__(self, x: Tensor) -> Tensor:
        x = ad.add(x, self.attn(self.ln1(x)))
        return ad.add(x, self.ff2(ad.relu(self.ff1(self.ln2(x)))))


class TransformerNet(Module):
    """Shared trunk + policy or value head over FC/OC token streams.

    representation "FC": input (in_dim,) chunked into in_dim/144 tokens with
    learned positional embeddings. representation "OC": input
    (n_slabs, m, 24) flattened to n_slabs*m object tokens with a learned
    per-slab embedding (shared by the slab's objects).
    """

    def __init__(
        self,
        representation: str,
        in_dim: int | tuple,
        out_dim: int,
        head: str,  # "policy" | "critic"
        cfg: TransformerConfig,
        rng: np.random.Generator,
    ):
        super().__init__()
        if representation not in ("FC", "OC"):
            raise ValueError(f"unknown representation: {representation}")
        if head not in ("policy", "critic"):
            raise ValueError(f"unknown head: {head}")
        self.representation = representation
        self.head_kind = head
        self.cfg = cfg
        self.out_dim = out_dim
        d = cfg.d_model

        if representation == "FC":
            if int(in_dim) % FC_TOKEN_WIDTH:
                raise ValueError(f"FC input length {in_dim} not a multiple of {FC_TOKEN_WIDTH}")
            self.n_tokens = int(in_dim) // FC_TOKEN_WIDTH
            self.proj = Linear(FC_TOKEN_WIDTH, d, rng)
            self.pos = self._register("pos", rng.normal(0.0, 0.02, (self.n_tokens, d)))
        else:
            self.n_slabs, self.m, row_dim = in_dim
            self.n_tokens = self.n_slabs * self.m
            self.proj = Linear(row_dim, d, rng)
            self.slab = self._register("slab", rng.normal(0.0, 0.02, (self.n_slabs, d)))
        self._adopt("proj", self.proj)

        self.blocks = []
        for i in range(cfg.n_layers):
            blk = Block(cfg, rng)
            self.blocks.append(blk)
            self._adopt(f"block{i}", blk)
        self.ln_f = LayerNorm(d)
        self._adopt("ln_f", self.ln_f)
        self.head = Linear(d, 4 if (head == "policy" and representation == "OC") else out_dim,
                           rng, zero_init=True)
        self._adopt("head", self.head)

    def _tokens(self, x: np.ndarray) -> Tensor:
        if self.representation == "FC":
            toks = Tensor(np.asarray(x, dtype=np.float64).reshape(self.n_tokens, FC_TOKEN_WIDTH))
            return ad.add(self.proj(toks), self.pos)
        toks = Tensor(np.asarray(x, dtype=np.float64).reshape(self.n_tokens, -1))
        return ad.add(self.proj(toks), ad.repeat_rows(self.slab, self.m))

    def trunk(self, x: np.ndarray) -> Tensor:
        t = self._tokens(x)
        for blk in self.blocks:
            t = blk(t)
        return self.ln_f(t)

    def forward(self, x: np.ndarray, mask: np.ndarray | None = None) -> Tensor:
        """Policy: masked log-probabilities over actions. Critic: scalar value."""
        t = self.trunk(x)
        if self.head_kind == "critic":
            return ad.reshape(self.head(ad.mean_rows(t)), ())
        if mask is None:
            raise ValueError("policy forward requires an action mask")
        if self.representation == "OC":
            logits = ad.reshape(self.head(ad.rows(t, 0, self.m)), (self.out_dim,))
        else:
            logits = ad.reshape(self.head(ad.mean_rows(t)), (self.out_dim,))
        return ad.masked_log_softmax(logits, mask)


def save_checkpoint(path, nets: dict, config: dict, rng_state: dict):
    """Write parameter arrays plus JSON-encoded config and RNG state (.npz)."""
    arrays = {}
    for prefix, net in nets.items():
        for name, value in net.state_dict().items():
            arrays[f"{prefix}/{name}"] = value
    meta = json.dumps({"config": config, "rng_state": rng_state}, sort_keys=True)
    with open(path, "wb") as fh:
        np.savez(fh, __meta__=np.frombuffer(meta.encode(), dtype=np.uint8), **arrays)


def load_checkpoint(path) -> tuple[dict, dict, dict]:
    """Returns (arrays-by-net-prefix, config, rng_state)."""
    with np.load(path) as data:
        meta = json.loads(bytes(data["__meta__"]).decode())
        nets: dict[str, dict] = {}
        for key in data.files:
            if key == "__meta__":
                continue
            prefix, name = key.split("/", 1)
            nets.setdefault(prefix, {})[name] = data[key]
    return nets, meta["config"], meta["rng_state"]
