"""Large deviations for two-colour urns driven by an arbitrary urn function."""

from .contacts import ContactAnalysis, find_contacts, reachable_interval, support_membership
from .errors import NumericalError, UrnError, UrnSpecError, UrnValidationError
from .exact import phi_n, psi_n, terminal_distribution
from .urn import UrnFunction, from_spec, load_urn

__version__ = "0.1.0"

__all__ = [
    "ContactAnalysis",
    "NumericalError",
    "UrnError",
    "UrnFunction",
    "UrnSpecError",
    "UrnValidationError",
    "find_contacts",
    "from_spec",
    "load_urn",
    "phi_n",
    "psi_n",
    "reachable_interval",
    "support_membership",
    "terminal_distribution",
]
