"""Transitive permutation group census and vertex-transitive graph toolkit."""

__version__ = "0.1.0"

from .perm import Perm, parse_perm, parse_perm_list
from .group import PermGroup

__all__ = ["Perm", "PermGroup", "parse_perm", "parse_perm_list", "__version__"]
