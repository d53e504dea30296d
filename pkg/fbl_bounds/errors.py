"""Error taxonomy shared by the numerical core, the API and the CLI.

Numerical failures map to exit code 1; query problems (infeasible targets,
unsupported combinations, regime violations) map to exit code 2 and are also
``ValueError`` subclasses.
"""

from __future__ import annotations

from typing import Optional


class FblError(Exception):
    exit_code = 1
    kind = "error"


class NumericalFailure(FblError):
    kind = "numerical-failure"


class NoSaddle(NumericalFailure):
    kind = "no-saddle"


class PathDiverged(NumericalFailure):
    kind = "path-diverged"

    def __init__(self, message: str, u: Optional[float] = None) -> None:
        super().__init__(message)
        self.u = u


class DegenerateSaddle(NumericalFailure):
    kind = "degenerate-saddle"


class PoleAtSaddle(NumericalFailure):
    kind = "pole-at-saddle"


class SecondOrderInvalid(NumericalFailure):
    kind = "second-order-invalid"


class QuadratureFailure(NumericalFailure):
    kind = "quadrature-failure"


class QueryError(FblError, ValueError):
    exit_code = 2
    kind = "query-error"


class InfeasibleQuery(QueryError):
    kind = "infeasible"


class Unsupported(QueryError):
    kind = "unsupported"


class RegimeViolation(QueryError):
    kind = "regime-violation"


class TailAssumptionViolated(RegimeViolation):
    kind = "tail-assumption-violated"


class DomainError(QueryError):
    kind = "domain-error"


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, FblError):
        return exc.exit_code
    if isinstance(exc, ValueError):
        return 2
    return 1


__all__ = [
    "DegenerateSaddle",
    "DomainError",
    "FblError",
    "InfeasibleQuery",
    "NoSaddle",
    "NumericalFailure",
    "PathDiverged",
    "PoleAtSaddle",
    "QuadratureFailure",
    "QueryError",
    "RegimeViolation",
    "SecondOrderInvalid",
    "TailAssumptionViolated",
    "Unsupported",
    "exit_code_for",
]
