"""Policy-gradient smoke run against the bridge's five-tuple API.

REINFORCE with a moving baseline and a small Gaussian policy network; the
point is to exercise reset/step/close from a training loop end to end, not
to reach any particular score.

Run directly:  python -m armlab_bridge.pg_smoke --episodes 10
"""

import argparse
import math

import numpy as np
import torch
from torch import nn

from .bridge import ArmBridgeEnv


class GaussianPolicy(nn.Module):
    def __init__(self, obs_size: int, action_size: int, hidden: int = 64):
        super().__init__()
        self.body = nn.Sequential(
            nn.Linear(obs_size, hidden), nn.Tanh(),
            nn.Linear(hidden, hidden), nn.Tanh(),
        )
        self.mean_head = nn.Linear(hidden, action_size)
        self.log_std = nn.Parameter(torch.full((action_size,), -0.5))

    def distribution(self, observation: torch.Tensor) -> torch.distributions.Normal:
        mean = torch.tanh(self.mean_head(self.body(observation)))
        return torch.distributions.Normal(mean, self.log_std.exp())


def run_smoke(scenario="case1", episodes=10, max_steps=100, seed=0,
              learning_rate=3e-4, discount=0.98, verbose=True):
    """Train for a handful of episodes; returns the per-episode scores."""
    torch.manual_seed(seed)
    env = ArmBridgeEnv(scenario, seed=seed)
    policy = GaussianPolicy(env.observation_size, env.action_size)
    optimizer = torch.optim.Adam(policy.parameters(), lr=learning_rate)
    baseline = 0.0
    scores = []
    for episode in range(episodes):
        observation, _ = env.reset(seed + episode)
        log_probs = []
        rewards = []
        for _ in range(max_steps):
            obs_t = torch.as_tensor(observation, dtype=torch.float32)
            dist = policy.distribution(obs_t)
            action = dist.sample()
            log_probs.append(dist.log_prob(action).sum())
            observation, reward, terminated, truncated, _ = env.step(
                np.clip(action.numpy(), -1.0, 1.0)
            )
            rewards.append(float(reward))
            if terminated or truncated:
                break
        score = sum(rewards)
        scores.append(score)
        returns = []
        acc = 0.0
        for r in reversed(rewards):
            acc = r + discount * acc
            returns.append(acc)
        returns.reverse()
        returns_t = torch.as_tensor(returns, dtype=torch.float32)
        baseline = 0.9 * baseline + 0.1 * float(returns_t.mean())
        advantage = returns_t - baseline
        if advantage.numel() > 1 and advantage.std() > 1e-8:
            advantage = advantage / advantage.std()
        loss = -(torch.stack(log_probs) * advantage).sum()
        optimizer.zero_grad()
        loss.backward()
        optimizer.step()
        if not math.isfinite(score):
            raise RuntimeError("non-finite episode score")
        if verbose:
            print(f"episode {episode}: steps {len(rewards)} score {score:.2f}")
    env.close()
    return scores


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--scenario", default="case1")
    parser.add_argument("--episodes", type=int, default=10)
    parser.add_argument("--max-steps", type=int, default=100)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)
    run_smoke(args.scenario, args.episodes, args.max_steps, args.seed)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
