"""Entropy-regularized advantage actor-critic training loop.

One gradient update per episode (batch size 1): play an episode collecting
(state, action, reward, log-prob, entropy, value) per attempt, compute
discounted returns and batch-normalized advantages, then update the critic
on squared return error and the policy on -(log-prob * advantage + beta *
entropy). Exploration follows an exponentially decaying epsilon schedule
(counted in episodes, reset at each curriculum phase); with probability
epsilon the action is drawn uniformly over unmasked actions, otherwise
from the policy distribution. Runs are fully deterministic given the seed.
"""

from __future__ import annotations

import math
import random
from dataclasses import asdict, dataclass, field

import numpy as np

from .. import engine, metrics
from ..board import BoardState
from ..encoders import (
    DEFAULT_ENCODER,
    EncoderConfig,
    HistoryStep,
    action_to_move,
    assemble_fc_input,
    assemble_oc_input,
    valid_action_mask,
)
from ..harness.runlog import RunLog
from ..rules import resolve_rule
from . import autodiff as ad
from . import kernels
from .transformer import TransformerConfig, TransformerNet


@dataclass(frozen=True)
class Hyperparams:
    lr: float = 1e-5
    gamma: float = 0.001
    eps_start: float = 0.99
    eps_end: float = 1e-4
    eps_decay: float = 200.0
    batch_size: int = 1
    n_pieces: int = 9
    entropy_beta: float = 0.01
    max_episodes: int = 10000
    move_cap: int = 300
    optimizer: str = "sgd"  # "sgd" | "adam"
    adv_eps: float = 1e-8

    def __post_init__(self):
        if self.eps_end >= self.eps_start:
            raise ValueError("eps_end must be below eps_start")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class TrajectoryStep:
    state: np.ndarray
    action: int
    reward: int
    logprob: float
    entropy: float
    value: float


def epsilon_at(t: int, hp: Hyperparams) -> float:
    """Exploration rate after t episodes of the current phase."""
    return hp.eps_end + (hp.eps_start - hp.eps_end) * math.exp(-t / hp.eps_decay)


def discounted_returns(rewards, gamma: float) -> list[float]:
    """G_t = sum_k gamma^k r_{t+k}, computed by the backward recursion."""
    if not len(rewards):
        raise ValueError("empty reward sequence")
    out = [0.0] * len(rewards)
    acc = 0.0
    for i in range(len(rewards) - 1, -1, -1):
        acc = rewards[i] + gamma * acc
        out[i] = acc
    return out


def advantages(returns, values, eps: float = 1e-8) -> list[float]:
    """A_t = G_t - V(s_t), normalized over the batch (skipped for length 1)."""
    if len(returns) != len(values):
        raise ValueError("returns/values length mismatch")
    raw = [g - v for g, v in zip(returns, values)]
    if len(raw) < 2:
        return raw
    mean = sum(raw) / len(raw)
    std = math.sqrt(sum((a - mean) ** 2 for a in raw) / len(raw))
    return [(a - mean) / (std + eps) for a in raw]


def critic_loss(returns, values) -> float:
    return sum((g - v) ** 2 for g, v in zip(returns, values)) / len(returns)


def policy_loss(logprobs, advs, entropies, beta: float) -> float:
    n = len(logprobs)
    return -sum(lp * a + beta * h for lp, a, h in zip(logprobs, advs, entropies)) / n


def sample_action(logp: np.ndarray, mask: np.ndarray, eps: float, rng: np.random.Generator) -> int:
    """Epsilon-uniform over unmasked actions, else sample the policy."""
    valid = np.flatnonzero(mask)
    if eps > 0.0 and rng.random() < eps:
        return int(valid[rng.integers(valid.size)])
    p = np.exp(logp[valid])
    p /= p.sum()
    return int(valid[rng.choice(valid.size, p=p)])


class SGD:
    def __init__(self, params, lr: float):
        self.params = [t for _, t in params]
        self.lr = lr

    def step(self):
        for t in self.params:
            if t.grad is not None:
                t.data -= self.lr * t.grad

    def zero_grad(self):
        for t in self.params:
            t.grad = None


class Adam:
    def __init__(self, params, lr: float, b1: float = 0.9, b2: float = 0.999, eps: float = 1e-8):
        self.params = [t for _, t in params]
        self.lr, self.b1, self.b2, self.eps = lr, b1, b2, eps
        self.t = 0
        self.m = [np.zeros_like(t.data) for t in self.params]
        self.v = [np.zeros_like(t.data) for t in self.params]

    def step(self):
        self.t += 1
        for i, t in enumerate(self.params):
            if t.grad is None:
                continue
            self.m[i] = self.b1 * self.m[i] + (1 - self.b1) * t.grad
            self.v[i] = self.b2 * self.v[i] + (1 - self.b2) * t.grad ** 2
            mhat = self.m[i] / (1 - self.b1 ** self.t)
            vhat = self.v[i] / (1 - self.b2 ** self.t)
            t.data -= self.lr * mhat / (np.sqrt(vhat) + self.eps)

    def zero_grad(self):
        for t in self.params:
            t.grad = None


def _make_optimizer(hp: Hyperparams, params):
    if hp.optimizer == "sgd":
        return SGD(params, hp.lr)
    if hp.optimizer == "adam":
        return Adam(params, hp.lr)
    raise ValueError(f"unknown optimizer: {hp.optimizer}")


def build_nets(representation: str, hp: Hyperparams, encoder_cfg: EncoderConfig,
               net_cfg: TransformerConfig, seed: int) -> tuple[TransformerNet, TransformerNet]:
    """Separate policy and critic networks with seed-derived initialization."""
    if representation == "FC":
        in_dim: int | tuple = encoder_cfg.fc_input_dim
        out_dim = 144
    else:
        in_dim = (encoder_cfg.n_hist + 1, hp.n_pieces, 24)
        out_dim = 4 * hp.n_pieces
    policy = TransformerNet(representation, in_dim, out_dim, "policy", net_cfg,
                            np.random.default_rng([seed, 1]))
    critic = TransformerNet(representation, in_dim, 1, "critic", net_cfg,
                            np.random.default_rng([seed, 2]))
    return policy, critic


def encode_state(board: BoardState, history, representation: str, m: int,
                 cfg: EncoderConfig) -> np.ndarray:
    if representation == "FC":
        return assemble_fc_input(board, history, cfg)
    return assemble_oc_input(board, history, m, cfg)


@dataclass
class TrainResult:
    log: RunLog
    policy: TransformerNet
    critic: TransformerNet
    phase_metrics: list = field(default_factory=list)
    aborted: bool = False


class _EarlyStop:
    """Incremental attainment check for the three metrics within a phase."""

    def __init__(self, params: metrics.MetricParams):
        self.p = params
        self.errors: list[float] = []
        self.accept_run = 0
        self.hit_mean = False
        self.hit_max = False
        self.hit_mstar = False

    def on_move(self, code: str):
        self.accept_run = self.accept_run + 1 if code == "A" else 0
        if self.accept_run >= self.p.w_mstar:
            self.hit_mstar = True

    def on_episode(self, error_rate: float):
        self.errors.append(error_rate)
        if len(self.errors) >= self.p.w_mean:
            window = self.errors[-self.p.w_mean:]
            if sum(window) / self.p.w_mean <= self.p.t_mean + 1e-12:
                self.hit_mean = True
        if len(self.errors) >= self.p.w_max:
            if max(self.errors[-self.p.w_max:]) <= self.p.t_max + 1e-12:
                self.hit_max = True

    @property
    def attained(self) -> bool:
        return self.hit_mean and self.hit_max and self.hit_mstar


def train_run(
    phase_rules,
    representation: str,
    hp: Hyperparams,
    seed: int,
    metric_params: metrics.MetricParams | None = None,
    encoder_cfg: EncoderConfig = DEFAULT_ENCODER,
    net_cfg: TransformerConfig | None = None,
    position_mode: str = "all",
    early_stop: bool = True,
    collect_verdicts: bool = False,
    log_path=None,
    checkpoint_path=None,
) -> TrainResult:
    """Train one model through the given curriculum phases; returns log + nets."""
    if isinstance(phase_rules, str):
        phase_rules = [phase_rules]
    metric_params = metric_params or metrics.MetricParams()
    net_cfg = net_cfg or TransformerConfig()
    specs = [resolve_rule(name) for name in phase_rules]

    policy, critic = build_nets(representation, hp, encoder_cfg, net_cfg, seed)
    opt_policy = _make_optimizer(hp, policy.parameters())
    opt_critic = _make_optimizer(hp, critic.parameters())

    rng = np.random.default_rng([seed, 3])
    seed_rng = random.Random(seed)
    m = hp.n_pieces

    log = RunLog(
        config={
            "phases": list(phase_rules),
            "representation": representation,
            "n_hist": encoder_cfg.n_hist,
            "seed": seed,
            "position_mode": position_mode,
            "hyperparams": hp.to_dict(),
            "net": asdict(net_cfg),
            "metric_params": metric_params.to_dict(),
            "kernel_backend": kernels.backend_name(),
        }
    )
    result = TrainResult(log=log, policy=policy, critic=critic)

    global_episode = 0
    global_move = 0
    for phase_idx, spec in enumerate(specs, start=1):
        log.add_phase(phase_idx, spec.name, global_episode + 1)
        stopper = _EarlyStop(metric_params)
        for phase_episode in range(hp.max_episodes):
            eps = epsilon_at(phase_episode, hp)
            ep_seed = seed_rng.randrange(2 ** 62)
            episode = engine.new_episode(
                spec, n=m, seed=ep_seed, position_set=position_mode,
                move_cap=hp.move_cap, collect_log=collect_verdicts,
            )
            global_episode += 1
            history: list[HistoryStep] = []
            logp_nodes, ent_nodes, val_nodes = [], [], []
            errors = 0

            steps: list[TrajectoryStep] = []
            cached = None  # (x, mask, logp, value); reusable while the state is unchanged
            while episode.ongoing:
                if cached is None:
                    x = encode_state(episode.board, history, representation, m, encoder_cfg)
                    mask = valid_action_mask(episode.board, representation, m)
                    # Rejected attempts leave board, history, and mask untouched,
                    # so the same graph nodes serve until the next accept.
                    cached = (x, mask, policy.forward(x, mask), critic.forward(x))
                x, mask, logp, value = cached
                action = sample_action(logp.data, mask, eps, rng)
                piece_id, bucket = action_to_move(action, episode.board, representation, m)
                board_before = tuple(episode.board.pieces)
                outcome = engine.attempt_move(episode, piece_id, bucket)
                global_move += 1

                entropy = ad.entropy_from_logp(logp, mask)
                steps.append(
                    TrajectoryStep(
                        state=x,
                        action=action,
                        reward=outcome.reward,
                        logprob=float(logp.data[action]),
                        entropy=float(entropy.data),
                        value=float(value.data),
                    )
                )
                logp_nodes.append(ad.take(logp, [action]))
                ent_nodes.append(entropy)
                val_nodes.append(value)
                if outcome.response_code == engine.RESPONSE_ACCEPT:
                    history.insert(0, HistoryStep(board_before, piece_id, bucket))
                    del history[encoder_cfg.n_hist:]
                    cached = None
                else:
                    errors += 1
                move_rec = {
                    "episode": global_episode,
                    "move": global_move,
                    "phase": phase_idx,
                    "action": action,
                    "piece": piece_id,
                    "bucket": bucket,
                    "code": outcome.letter,
                }
                if collect_verdicts:
                    move_rec["verdicts"] = episode.move_log[-1]["verdicts"]
                log.moves.append(move_rec)
                stopper.on_move(outcome.letter)

            n_moves = episode.move_count
            error_rate = errors / n_moves if n_moves else 0.0
            log.episodes.append(
                {
                    "episode": global_episode,
                    "phase": phase_idx,
                    "seed": ep_seed,
                    "moves": n_moves,
                    "errors": errors,
                    "error_rate": error_rate,
                    "finish_code": episode.finish_code,
                    "mode": position_mode,
                    "epsilon": eps,
                }
            )
            stopper.on_episode(error_rate)

            # One update per episode (batch size 1).
            returns = discounted_returns([s.reward for s in steps], hp.gamma)
            advs = advantages(returns, [s.value for s in steps], hp.adv_eps)
            n = len(returns)

            c_loss = None
            for v, g in zip(val_nodes, returns):
                term = ad.square(ad.add(v, -g))
                c_loss = term if c_loss is None else ad.add(c_loss, term)
            c_loss = ad.scale(c_loss, 1.0 / n)

            p_loss = None
            for lp, a, h in zip(logp_nodes, advs, ent_nodes):
                term = ad.add(ad.scale(ad.tsum(lp), a), ad.scale(h, hp.entropy_beta))
                p_loss = term if p_loss is None else ad.add(p_loss, term)
            p_loss = ad.scale(p_loss, -1.0 / n)

            if not (np.isfinite(c_loss.data) and np.isfinite(p_loss.data)):
                log.events.append(
                    {
                        "event": "abort",
                        "reason": "non_finite_loss",
                        "episode": global_episode,
                        "critic_loss": float(c_loss.data),
                        "policy_loss": float(p_loss.data),
                    }
                )
                result.aborted = True
                if log_path:
                    log.write(log_path)
                return result

            opt_critic.zero_grad()
            c_loss.backward()
            opt_critic.step()
            opt_policy.zero_grad()
            p_loss.backward()
            opt_policy.step()

            if early_stop and stopper.attained:
                log.events.append(
                    {"event": "early_stop", "phase": phase_idx, "episode": global_episode}
                )
                break

        result.phase_metrics.append(
            metrics.run_metrics(log.error_series(phase_idx), log.code_series(phase_idx), metric_params)
        )

    if log_path:
        log.write(log_path)
    if checkpoint_path:
        from .transformer import save_checkpoint

        st = seed_rng.getstate()
        save_checkpoint(
            checkpoint_path,
            {"policy": policy, "critic": critic},
            config=log.config,
            rng_state={
                "sampler": rng.bit_generator.state,
                "episode_seeds": {"version": st[0], "state": list(st[1]), "gauss": st[2]},
            },
        )
    return result


def play_episode(policy: TransformerNet, episode, representation: str, m: int,
                 encoder_cfg: EncoderConfig, rng: np.random.Generator,
                 greedy: bool = False, eps: float = 0.0) -> dict:
    """Run one episode with a frozen policy; returns the episode record."""
    history: list[HistoryStep] = []
    errors = 0
    while episode.ongoing:
        x = encode_state(episode.board, history, representation, m, encoder_cfg)
        mask = valid_action_mask(episode.board, representation, m)
        logp = policy.forward(x, mask)
        if greedy:
            data = np.where(mask, logp.data, -np.inf)
            action = int(np.argmax(data))
        else:
            action = sample_action(logp.data, mask, eps, rng)
        piece_id, bucket = action_to_move(action, episode.board, representation, m)
        board_before = tuple(episode.board.pieces)
        outcome = engine.attempt_move(episode, piece_id, bucket)
        if outcome.response_code == engine.RESPONSE_ACCEPT:
            history.insert(0, HistoryStep(board_before, piece_id, bucket))
            del history[encoder_cfg.n_hist:]
        else:
            errors += 1
    return {
        "moves": episode.move_count,
        "errors": errors,
        "error_rate": errors / episode.move_count if episode.move_count else 0.0,
        "finish_code": episode.finish_code,
        "mode": episode.position_set.mode,
    }
