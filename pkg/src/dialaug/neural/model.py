"""Joint four-decoder network: context encoder, action / paraphrase / belief /
response decoders with additive attention, cross-decoder attention links and a
pointer-generator copy mechanism over the encoder input.

Decoder chain (teacher-forced during training, greedy at test time):
  action     <- encoder(R_prev, U)
  paraphrase <- encoder(R_prev, U)            + attention over action hiddens
  belief     <- encoder(R_prev, U, B_prev)    + attention over paraphrase hiddens
  response   <- encoder(R_prev, U)            + attention over belief hiddens
                + database match bucket appended to the first decoder input
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, asdict, replace

import numpy as np

from . import autodiff as ad
from .autodiff import Tensor
from .vocab import Vocab, CopyExtension, UNK_ID, BOS_ID, EOS_ID, SEP

log = logging.getLogger(__name__)

DECODERS = ("action", "para", "belief", "response")
DB_BUCKETS = 3

LOG_EPS = 1e-12


class TrainingError(Exception):
    """Non-finite loss or another unrecoverable numerical failure."""


@dataclass(frozen=True)
class ModelConfig:
    embed_dim: int = 50
    hidden_dim: int = 50
    vocab_size: int = 0
    max_encode_len: int = 160
    max_decode_action: int = 24
    max_decode_paraphrase: int = 40
    max_decode_belief: int = 48
    max_decode_response: int = 48
    learning_rate: float = 0.003
    lr_halve_patience: int = 3
    early_stop_patience: int = 5
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    batch_size: int = 32
    clip_norm: float = 5.0
    init_scale: float = 0.08
    max_epochs: int = 50
    seed: int = 0

    def __post_init__(self):
        if self.embed_dim <= 0 or self.hidden_dim <= 0:
            raise ValueError("embed_dim and hidden_dim must be positive")
        if self.lr_halve_patience <= 0 or self.early_stop_patience <= 0:
            raise ValueError("patience values must be positive")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, obj: dict) -> "ModelConfig":
        return cls(**obj)

    def with_vocab(self, vocab_size: int) -> "ModelConfig":
        return replace(self, vocab_size=vocab_size)

    def max_decode(self, decoder: str) -> int:
        return {
            "action": self.max_decode_action,
            "para": self.max_decode_paraphrase,
            "belief": self.max_decode_belief,
            "response": self.max_decode_response,
        }[decoder]


def _layout(cfg: ModelConfig) -> list[tuple[str, tuple[int, ...]]]:
    """Stable (name, shape) list defining the flat parameter ordering."""
    e, h, v = cfg.embed_dim, cfg.hidden_dim, cfg.vocab_size
    a = h
    out: list[tuple[str, tuple[int, ...]]] = [("embed", (v, e))]
    for direction in ("fwd", "bwd"):
        out += [
            (f"enc.{direction}.Wx", (e, 3 * h)),
            (f"enc.{direction}.Uh", (h, 3 * h)),
            (f"enc.{direction}.b", (1, 3 * h)),
        ]
    for name in DECODERS:
        ctx_w = 2 * h if name == "action" else 3 * h
        in_x = e + (DB_BUCKETS if name == "response" else 0)
        out += [
            (f"dec.{name}.init.W", (2 * h, h)),
            (f"dec.{name}.init.b", (1, h)),
            (f"dec.{name}.cell.Wx", (in_x + ctx_w, 3 * h)),
            (f"dec.{name}.cell.Uh", (h, 3 * h)),
            (f"dec.{name}.cell.b", (1, 3 * h)),
            (f"dec.{name}.att_enc.Wq", (h, a)),
            (f"dec.{name}.att_enc.Wk", (2 * h, a)),
            (f"dec.{name}.att_enc.b", (1, a)),
            (f"dec.{name}.att_enc.v", (a, 1)),
        ]
        if name != "action":
            out += [
                (f"dec.{name}.att_cross.Wq", (h, a)),
                (f"dec.{name}.att_cross.Wk", (h, a)),
                (f"dec.{name}.att_cross.b", (1, a)),
                (f"dec.{name}.att_cross.v", (a, 1)),
            ]
        out += [
            (f"dec.{name}.out.W", (h + ctx_w, v)),
            (f"dec.{name}.out.b", (1, v)),
            (f"dec.{name}.gate.w", (h + ctx_w, 1)),
            (f"dec.{name}.gate.b", (1, 1)),
        ]
    return out


class ModelParams:
    """All trainable tensors, with a stable flat-vector view."""

    def __init__(self, cfg: ModelConfig, rng: np.random.Generator | None = None):
        if cfg.vocab_size <= 0:
            raise ValueError("ModelConfig.vocab_size must be set before building parameters")
        self.cfg = cfg
        self.layout = _layout(cfg)
        rng = rng or np.random.Generator(np.random.PCG64(cfg.seed))
        self.tensors: dict[str, Tensor] = {}
        for name, shape in self.layout:
            data = rng.uniform(-cfg.init_scale, cfg.init_scale, size=shape)
            self.tensors[name] = ad.param(data)

    def __getitem__(self, name: str) -> Tensor:
        return self.tensors[name]

    @property
    def n_params(self) -> int:
        return sum(t.data.size for t in self.tensors.values())

    def flat(self) -> np.ndarray:
        return np.concatenate([self.tensors[n].data.ravel() for n, _ in self.layout])

    def load_flat(self, vec: np.ndarray) -> None:
        if vec.size != self.n_params:
            raise ValueError(f"expected {self.n_params} values, got {vec.size}")
        offset = 0
        for name, shape in self.layout:
            size = int(np.prod(shape))
            self.tensors[name].data = vec[offset : offset + size].reshape(shape).astype(np.float64)
            offset += size

    def grad_flat(self) -> np.ndarray:
        parts = []
        for name, shape in self.layout:
            g = self.tensors[name].grad
            parts.append(np.zeros(int(np.prod(shape))) if g is None else g.ravel())
        return np.concatenate(parts)

    def zero_grads(self) -> None:
        for t in self.tensors.values():
            t.grad = None

    def check_finite(self) -> None:
        for name, _ in self.layout:
            if not np.all(np.isfinite(self.tensors[name].data)):
                raise TrainingError(f"non-finite values in parameter {name!r}")


def _gru_step(params: ModelParams, prefix: str, x: Tensor, h: Tensor, hidden: int) -> Tensor:
    nx = ad.add(ad.matmul(x, params[f"{prefix}.Wx"]), params[f"{prefix}.b"])
    nh = ad.matmul(h, params[f"{prefix}.Uh"])
    z = ad.sigmoid(ad.add(ad.narrow(nx, 1, 0, hidden), ad.narrow(nh, 1, 0, hidden)))
    r = ad.sigmoid(ad.add(ad.narrow(nx, 1, hidden, hidden), ad.narrow(nh, 1, hidden, hidden)))
    c = ad.tanh(ad.add(ad.narrow(nx, 1, 2 * hidden, hidden), ad.mul(r, ad.narrow(nh, 1, 2 * hidden, hidden))))
    keep = ad.mul(z, h)
    new = ad.mul(ad.sub(ad.const(np.ones((1, hidden))), z), c)
    return ad.add(keep, new)


@dataclass
class Encoding:
    hiddens: Tensor  # (T, 2H)
    final: Tensor  # (1, 2H)
    tokens: list[str]


def encode(params: ModelParams, token_ids: list[int], tokens: list[str]) -> Encoding:
    """Bi-directional recurrent pass; per-position hidden is the concatenation of directions."""
    cfg = params.cfg
    h_dim = cfg.hidden_dim
    if len(token_ids) > cfg.max_encode_len:
        log.warning("encoder input of %d tokens truncated to %d", len(token_ids), cfg.max_encode_len)
        token_ids = token_ids[: cfg.max_encode_len]
        tokens = tokens[: cfg.max_encode_len]
    if not token_ids:
        raise ValueError("encoder input must be non-empty")
    emb = ad.gather_rows(params["embed"], token_ids)  # (T, E)
    n = len(token_ids)

    fwd: list[Tensor] = []
    h = ad.const(np.zeros((1, h_dim)))
    for t in range(n):
        h = _gru_step(params, "enc.fwd", ad.narrow(emb, 0, t, 1), h, h_dim)
        fwd.append(h)
    bwd: list[Tensor] = [None] * n  # type: ignore[list-item]
    h = ad.const(np.zeros((1, h_dim)))
    for t in reversed(range(n)):
        h = _gru_step(params, "enc.bwd", ad.narrow(emb, 0, t, 1), h, h_dim)
        bwd[t] = h
    per_pos = [ad.concat([f, b], axis=1) for f, b in zip(fwd, bwd)]
    return Encoding(
        hiddens=ad.concat(per_pos, axis=0),
        final=ad.concat([fwd[-1], bwd[0]], axis=1),
        tokens=list(tokens),
    )


class AttentionSite:
    """Additive attention over a fixed key matrix; key projections are shared across steps."""

    def __init__(self, params: ModelParams, prefix: str, keys: Tensor):
        self.params = params
        self.prefix = prefix
        self.keys = keys
        self.proj_k = ad.add(ad.matmul(keys, params[f"{prefix}.Wk"]), params[f"{prefix}.b"])  # (T, A)

    def __call__(self, query: Tensor) -> tuple[Tensor, Tensor]:
        """(context row (1, K), attention weights (1, T)) for a (1, H) query."""
        scores = ad.matmul(ad.tanh(ad.add(ad.matmul(query, self.params[f"{self.prefix}.Wq"]), self.proj_k)),
                           self.params[f"{self.prefix}.v"])  # (T, 1)
        weights = ad.softmax(scores, axis=0)
        ctx = ad.matmul(ad.transpose(weights), self.keys)
        return ctx, ad.transpose(weights)


@dataclass
class DecodeStep:
    probs: Tensor  # (1, extended vocab width): mixture distribution
    copy_probs: Tensor  # (1, extended vocab width): copy component alone
    gate: Tensor  # (1, 1)
    hidden: Tensor  # (1, H)


class Decoder:
    """One decoding head bound to its attention sites and copy source."""

    def __init__(
        self,
        params: ModelParams,
        name: str,
        encoding: Encoding,
        ext: CopyExtension,
        cross_keys: Tensor | None = None,
        db_bucket: int | None = None,
    ):
        if (cross_keys is None) != (name == "action"):
            raise ValueError(f"decoder {name!r} cross-attention wiring is wrong")
        if (db_bucket is not None) != (name == "response"):
            raise ValueError("db bucket applies to the response decoder only")
        self.params = params
        self.name = name
        self.cfg = params.cfg
        self.ext = ext
        self.att_enc = AttentionSite(params, f"dec.{name}.att_enc", encoding.hiddens)
        self.att_cross = AttentionSite(params, f"dec.{name}.att_cross", cross_keys) if cross_keys is not None else None
        self.src_ids = [ext.source_id(t) for t in encoding.tokens]
        self.db_bucket = db_bucket
        self.state = ad.tanh(
            ad.add(ad.matmul(encoding.final, params[f"dec.{name}.init.W"]), params[f"dec.{name}.init.b"])
        )
        self.first_step = True
        self._zeros_ext = (
            ad.const(np.zeros((1, ext.width - params.cfg.vocab_size))) if ext.width > params.cfg.vocab_size else None
        )

    def step(self, x_emb: Tensor) -> DecodeStep:
        p = self.params
        name = self.name
        if name == "response":
            flag = np.zeros((1, DB_BUCKETS))
            if self.first_step:
                flag[0, self.db_bucket] = 1.0
            x_emb = ad.concat([x_emb, ad.const(flag)], axis=1)
        self.first_step = False

        ctx_enc, w_enc = self.att_enc(self.state)
        parts = [ctx_enc]
        if self.att_cross is not None:
            ctx_cross, _ = self.att_cross(self.state)
            parts.append(ctx_cross)
        ctx = ad.concat(parts, axis=1) if len(parts) > 1 else parts[0]

        self.state = _gru_step(p, f"dec.{name}.cell", ad.concat([x_emb, ctx], axis=1), self.state, self.cfg.hidden_dim)
        feat = ad.concat([self.state, ctx], axis=1)
        p_vocab = ad.softmax(ad.add(ad.matmul(feat, p[f"dec.{name}.out.W"]), p[f"dec.{name}.out.b"]), axis=1)
        if self._zeros_ext is not None:
            p_vocab = ad.concat([p_vocab, self._zeros_ext], axis=1)
        gate = ad.sigmoid(ad.add(ad.matmul(feat, p[f"dec.{name}.gate.w"]), p[f"dec.{name}.gate.b"]))
        p_copy = ad.scatter_cols(w_enc, self.src_ids, self.ext.width)
        one = ad.const(np.ones((1, 1)))
        probs = ad.add(ad.mul(gate, p_vocab), ad.mul(ad.sub(one, gate), p_copy))
        return DecodeStep(probs=probs, copy_probs=p_copy, gate=gate, hidden=self.state)

    def run_teacher(self, vocab: Vocab, target_tokens: list[str]) -> tuple[list[DecodeStep], list[int]]:
        """Teacher-forced pass; returns per-step outputs and extended target ids (incl. EOS)."""
        teacher_ids = [BOS_ID] + [vocab.id(t) for t in target_tokens]
        target_ids = [self.ext.target_id(t) for t in target_tokens] + [EOS_ID]
        emb = ad.gather_rows(self.params["embed"], teacher_ids)
        steps = []
        for i in range(len(teacher_ids)):
            steps.append(self.step(ad.narrow(emb, 0, i, 1)))
        return steps, target_ids

    def run_greedy(self, vocab: Vocab, max_len: int) -> tuple[list[DecodeStep], list[str]]:
        """Greedy decode until EOS or max_len; returns steps and emitted tokens (EOS excluded)."""
        prev_id = BOS_ID
        steps: list[DecodeStep] = []
        tokens: list[str] = []
        for _ in range(max_len):
            emb = ad.gather_rows(self.params["embed"], [prev_id])
            step = self.step(emb)
            steps.append(step)
            choice = int(np.argmax(step.probs.data[0]))
            if choice == EOS_ID:
                break
            tokens.append(self.ext.token(choice))
            prev_id = choice if choice < len(vocab) else UNK_ID
        return steps, tokens


def sequence_nll(steps: list[DecodeStep], target_ids: list[int]) -> Tensor:
    """Mean per-token negative log-likelihood of the mixture distributions."""
    if len(steps) != len(target_ids):
        raise ValueError(f"{len(steps)} steps vs {len(target_ids)} targets")
    eps = ad.const(np.full((1, 1), LOG_EPS))
    total: Tensor | None = None
    for step, tid in zip(steps, target_ids):
        nll = ad.scale(ad.log(ad.add(ad.pick(step.probs, 0, tid), eps)), -1.0)
        total = nll if total is None else ad.add(total, nll)
    return ad.scale(total, 1.0 / len(target_ids))


@dataclass
class ForwardResult:
    total: Tensor
    loss_action: Tensor
    loss_paraphrase: Tensor
    loss_belief: Tensor
    loss_response: Tensor
    steps: dict[str, list[DecodeStep]]
    targets: dict[str, list[int]]
    ext: CopyExtension

    def components(self) -> dict[str, float]:
        return {
            "total": self.total.item(),
            "a": self.loss_action.item(),
            "p": self.loss_paraphrase.item(),
            "b": self.loss_belief.item(),
            "r": self.loss_response.item(),
        }


def _encoder_inputs(inst) -> tuple[list[str], list[str]]:
    short = list(inst.context) + [SEP] + list(inst.user_input)
    full = short + [SEP] + list(inst.prev_belief)
    return short, full


def forward_instance(params: ModelParams, vocab: Vocab, inst, losses: frozenset[str] | None = None) -> ForwardResult:
    """Teacher-forced forward pass of all four decoders for one training instance.

    Every decoder always runs (downstream attention needs its hiddens); `losses`
    masks which components contribute to the total.  A turn without a
    paraphrase target teacher-forces the paraphrase decoder on the user input
    and contributes zero paraphrase loss.
    """
    active = losses if losses is not None else inst.losses
    enc1_tokens, enc2_tokens = _encoder_inputs(inst)
    ext = CopyExtension(vocab, enc2_tokens)
    enc1 = encode(params, [vocab.id(t) for t in enc1_tokens], enc1_tokens)
    enc2 = encode(params, [vocab.id(t) for t in enc2_tokens], enc2_tokens)

    dec_a = Decoder(params, "action", enc1, ext)
    steps_a, targets_a = dec_a.run_teacher(vocab, list(inst.act_target))

    para_target = list(inst.paraphrase_target) if inst.paraphrase_target is not None else list(inst.user_input)
    dec_p = Decoder(params, "para", enc1, ext, cross_keys=ad.concat([s.hidden for s in steps_a], axis=0))
    steps_p, targets_p = dec_p.run_teacher(vocab, para_target)

    dec_b = Decoder(params, "belief", enc2, ext, cross_keys=ad.concat([s.hidden for s in steps_p], axis=0))
    steps_b, targets_b = dec_b.run_teacher(vocab, list(inst.belief_target))

    dec_r = Decoder(
        params, "response", enc1, ext,
        cross_keys=ad.concat([s.hidden for s in steps_b], axis=0),
        db_bucket=inst.db_bucket,
    )
    steps_r, targets_r = dec_r.run_teacher(vocab, list(inst.response_target))

    zero = ad.const(np.zeros((1, 1)))
    loss_a = sequence_nll(steps_a, targets_a) if "a" in active else zero
    loss_p = (
        sequence_nll(steps_p, targets_p)
        if ("p" in active and inst.paraphrase_target is not None)
        else zero
    )
    loss_b = sequence_nll(steps_b, targets_b) if "b" in active else zero
    loss_r = sequence_nll(steps_r, targets_r) if "r" in active else zero
    total = ad.add(ad.add(loss_a, loss_p), ad.add(loss_b, loss_r))
    if not np.isfinite(total.data).all():
        raise TrainingError(
            f"non-finite loss on dialog {inst.dialog_id!r} turn {inst.turn}: "
            f"a={loss_a.item()} p={loss_p.item()} b={loss_b.item()} r={loss_r.item()}"
        )
    return ForwardResult(
        total=total,
        loss_action=loss_a,
        loss_paraphrase=loss_p,
        loss_belief=loss_b,
        loss_response=loss_r,
        steps={"action": steps_a, "para": steps_p, "belief": steps_b, "response": steps_r},
        targets={"action": targets_a, "para": targets_p, "belief": targets_b, "response": targets_r},
        ext=ext,
    )


def joint_loss(result: ForwardResult) -> tuple[float, float, float, float, float]:
    """(total, loss_a, loss_p, loss_b, loss_r) scalars of a forward pass."""
    c = result.components()
    return c["total"], c["a"], c["p"], c["b"], c["r"]


@dataclass
class TurnOutput:
    action: list[str]
    paraphrase: list[str]
    belief: list[str]
    response: list[str]
    db_bucket: int


def generate_turn(
    params: ModelParams,
    vocab: Vocab,
    context: list[str],
    prev_belief: list[str],
    user_input: list[str],
    db_bucket_fn=None,
) -> TurnOutput:
    """Greedy full-turn rollout: action, paraphrase, belief, then response.

    `db_bucket_fn` maps the predicted belief tokens to a database match bucket
    (0, 1 or 2); without it the response decoder sees bucket 0.
    """
    cfg = params.cfg
    enc1_tokens = list(context) + [SEP] + list(user_input)
    enc2_tokens = enc1_tokens + [SEP] + list(prev_belief)
    ext = CopyExtension(vocab, enc2_tokens)
    enc1 = encode(params, [vocab.id(t) for t in enc1_tokens], enc1_tokens)
    enc2 = encode(params, [vocab.id(t) for t in enc2_tokens], enc2_tokens)

    dec_a = Decoder(params, "action", enc1, ext)
    steps_a, action = dec_a.run_greedy(vocab, cfg.max_decode("action"))

    dec_p = Decoder(params, "para", enc1, ext, cross_keys=ad.concat([s.hidden for s in steps_a], axis=0))
    steps_p, paraphrase = dec_p.run_greedy(vocab, cfg.max_decode("para"))

    dec_b = Decoder(params, "belief", enc2, ext, cross_keys=ad.concat([s.hidden for s in steps_p], axis=0))
    steps_b, belief = dec_b.run_greedy(vocab, cfg.max_decode("belief"))

    bucket = int(db_bucket_fn(belief)) if db_bucket_fn is not None else 0
    dec_r = Decoder(
        params, "response", enc1, ext,
        cross_keys=ad.concat([s.hidden for s in steps_b], axis=0),
        db_bucket=bucket,
    )
    _, response = dec_r.run_greedy(vocab, cfg.max_decode("response"))
    return TurnOutput(action=action, paraphrase=paraphrase, belief=belief, response=response, db_bucket=bucket)
