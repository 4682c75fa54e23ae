"""Exception types shared across the package."""


class TdhoError(Exception):
    """Base class for all package errors."""


class ProfileError(TdhoError, ValueError):
    """Invalid oscillator profile: bad parameters, unknown keys, or
    non-positive mass at some evaluation time."""


class ModeSolverError(TdhoError, RuntimeError):
    """Mode-function construction failed: bad initial data, integrator
    breakdown, or an invalid WKB request (frequency reaching zero)."""


class PhaseUnwrapError(TdhoError, RuntimeError):
    """Phase continuation between consecutive trajectory samples is
    ambiguous; the time grid is too coarse to unwrap safely."""


class GridError(TdhoError, ValueError):
    """Spatial grid problem: mismatched grids, insufficient coverage of
    the wave-function support, or resolution below the Nyquist need."""


class ScenarioError(TdhoError, ValueError):
    """Scenario file failed validation."""
