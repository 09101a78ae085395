"""Quantitative models of a middle-relay adversary targeting onion-routing users."""
from .model import (
    AdversaryParams,
    CabalScenario,
    CaptureScenario,
    ClientGroup,
    ResourceCapError,
    SeededRng,
    ValidationError,
    validate_scenario,
)

__version__ = "0.1.0"
