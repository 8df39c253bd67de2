"""Exception types raised across the package."""

from __future__ import annotations


class FreeChoiceError(Exception):
    """Base class for all errors raised by this package."""


# -- distributions ---------------------------------------------------------


class DistributionError(FreeChoiceError, ValueError):
    pass


class DuplicateVariable(DistributionError):
    pass


class InvalidVariable(DistributionError):
    pass


class OutOfAlphabet(DistributionError):
    pass


class NotNormalized(DistributionError):
    def __init__(self, actual_sum):
        self.actual_sum = actual_sum
        super().__init__(f"probabilities sum to {actual_sum}, not 1")


class NegativeProbability(DistributionError):
    pass


class MixedMode(DistributionError):
    pass


class UnknownVariable(DistributionError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class EmptyKeepSet(DistributionError):
    pass


class ZeroProbabilityEvent(DistributionError):
    pass


class OverlappingSets(DistributionError):
    pass


class NameCollision(DistributionError):
    pass


# -- causal orders ---------------------------------------------------------


class OrderError(FreeChoiceError, ValueError):
    pass


class UnknownLabel(OrderError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class SameLabel(OrderError):
    pass


# -- spacetime -------------------------------------------------------------


class SpacetimeError(FreeChoiceError, ValueError):
    pass


class DimensionMismatch(SpacetimeError):
    pass


class DuplicateLabel(SpacetimeError):
    pass


class SuperluminalBoost(SpacetimeError):
    pass


class BadAxis(SpacetimeError):
    pass


# -- freedom ---------------------------------------------------------------


class LabelMismatch(FreeChoiceError, ValueError):
    pass


class WrongOrderShape(FreeChoiceError, ValueError):
    pass


# -- scenarios / sampling --------------------------------------------------


class BadResponseMap(FreeChoiceError, ValueError):
    pass


class SpecMismatch(FreeChoiceError, ValueError):
    pass


class DegenerateTable(FreeChoiceError, ValueError):
    pass


class SampleFileError(FreeChoiceError, ValueError):
    pass


class UnknownDemo(FreeChoiceError, KeyError):
    def __str__(self):
        return Exception.__str__(self)
