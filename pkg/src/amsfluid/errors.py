"""Reason codes shared by every module.

Numeric failures raise :class:`AmsError` carrying one of the codes below, so
callers (and the CLI) can branch on ``err.code`` instead of parsing messages.
"""

UNSTABLE = "UNSTABLE"
INTEGER_C = "INTEGER_C"
OUT_OF_RANGE = "OUT_OF_RANGE"
DEGENERATE_SPECTRUM = "DEGENERATE_SPECTRUM"
CANCELLATION = "CANCELLATION"
DOMAIN = "DOMAIN"
BRANCH = "BRANCH"
COMPLEX = "COMPLEX"
SINGULAR = "SINGULAR"
POLE = "POLE"
NO_CONVERGENCE = "NO_CONVERGENCE"
OUT_OF_REGION = "OUT_OF_REGION"
SLOW_CONVERGENCE = "SLOW_CONVERGENCE"
NEAR_COALESCENCE = "NEAR_COALESCENCE"


class AmsError(ValueError):
    def __init__(self, code, message=""):
        self.code = code
        super().__init__(f"{code}: {message}" if message else code)
