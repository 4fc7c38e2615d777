"""Custom exceptions for the deposit auction toolkit."""

from typing import Any, Dict, Optional


class DepositAuctionError(Exception):
    """Base exception for the deposit auction toolkit."""

    def __init__(
        self,
        message: str,
        details: Optional[Dict[str, Any]] = None,
        exit_code: int = 1,
    ) -> None:
        super().__init__(message)
        self.message = message
        self.details = details or {}
        self.exit_code = exit_code


class ConfigurationError(DepositAuctionError):
    """Raised when a run configuration is invalid."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None) -> None:
        super().__init__(message, details, exit_code=2)


class DomainError(DepositAuctionError):
    """Raised when an argument lies outside an operation's domain."""


class DegenerateIntervalError(DomainError):
    """Raised when an interval is too short to condition on."""


class NoSignChangeError(DepositAuctionError):
    """Raised when a root bracket does not change sign."""


class ConvergenceError(DepositAuctionError):
    """Raised when an iterative method hits its iteration cap."""


class NonFiniteError(DepositAuctionError):
    """Raised when an ODE right-hand side evaluates to a non-finite value."""


class NoSolutionError(DepositAuctionError):
    """Raised when an equilibrium system has no solution in the scanned range."""


class InequalityViolatedError(DepositAuctionError):
    """Raised when a solved equilibrium fails its incentive inequality."""


class DiscriminantError(DomainError):
    """Raised when an interior deposit has a negative discriminant."""


class OutOfRangeError(DomainError):
    """Raised when a deposit lies outside the range of a deposit function."""
