"""Exception types shared across the solver, mapped to CLI exit codes."""

from __future__ import annotations


class ValidationError(ValueError):
    """A parameter or input file failed validation (CLI exit code 2)."""


class SolverError(RuntimeError):
    """An iterative linear solve failed to converge (CLI exit code 3)."""


class BlowUpError(RuntimeError):
    """The time integration produced non-finite or huge values (CLI exit code 4)."""

    def __init__(self, step_index: int, time: float, max_abs: float):
        self.step_index = step_index
        self.time = time
        self.max_abs = max_abs
        super().__init__(
            f"solution blew up at step {step_index} (t={time:g}): max |u| = {max_abs:.3e}"
        )
