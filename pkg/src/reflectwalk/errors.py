"""Error type shared by every module in the package."""

from __future__ import annotations


class WalkError(ValueError):
    """Raised for invalid input or an unsatisfied precondition.

    ``code`` is a stable machine-readable identifier such as
    ``"SUM_NOT_ONE"``; the CLI prints it and tests match on it.
    """

    def __init__(self, code: str, message: str = ""):
        self.code = code
        super().__init__(f"{code}: {message}" if message else code)
