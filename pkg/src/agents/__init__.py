"""Agents module - discrete soft actor-critic over history latents"""

from .sacd import SACDAgent, Transitions, mlp, select_actions

__all__ = ["SACDAgent", "Transitions", "mlp", "select_actions"]
