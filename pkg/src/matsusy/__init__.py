"""Matrix shape-invariant superpotentials: catalog, special functions, spectra and states."""
from .catalog import Branch, FamilyId, Params

__all__ = ["Branch", "FamilyId", "Params"]
__version__ = "0.1.0"
