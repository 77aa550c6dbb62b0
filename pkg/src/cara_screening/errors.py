"""Exception types shared across the package."""

from __future__ import annotations


class ContractError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(ContractError, ValueError):
    """An argument lies outside the domain of a function."""


class BracketError(ContractError):
    """A root is not bracketed on [0, mu_max], or the effort bound binds."""


class RegimeUnsupported(ContractError):
    """The parameters fall outside the H-imitation regime the solver handles.

    ``kind`` is ``"l_imitation"`` when the L-type would take the H-contract and
    ``"no_h_imitation"`` when the H-type has no incentive to imitate even under
    second-best contracts.
    """

    def __init__(self, message: str, kind: str):
        super().__init__(message)
        self.kind = kind


class ConfigError(ContractError):
    """Configuration failed validation; ``errors`` lists every problem found."""

    def __init__(self, errors: list[str]):
        super().__init__("; ".join(errors))
        self.errors = list(errors)


class NumericError(ContractError):
    """A numerical estimate left its valid range (e.g. Monte Carlo underflow)."""
