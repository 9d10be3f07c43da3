"""Numerical failure exceptions"""

from typing import Any, Dict, Optional


class NonFiniteLossError(RuntimeError):
    """A loss evaluated to NaN or inf; the update is aborted"""

    def __init__(self, message: str, context: Optional[Dict[str, Any]] = None):
        self.context = dict(context or {})
        if self.context:
            details = ", ".join(f"{k}={v}" for k, v in self.context.items())
            message = f"{message} ({details})"
        super().__init__(message)


class NonFiniteParameterError(RuntimeError):
    """A parameter became NaN or inf after an optimizer step"""

    def __init__(self, name: str, optimizer_name: str = "optimizer"):
        self.name = name
        self.optimizer_name = optimizer_name
        super().__init__(f"Parameter '{name}' is non-finite after {optimizer_name} step")
