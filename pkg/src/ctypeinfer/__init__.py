"""Conceptual type inference for Java API-call arguments."""

__version__ = "0.1.0"

from .registry import CType, Registry, RegistryEntry, load_registry, lookup  # noqa: E402
from .resolve import MethodId, encode_method_id  # noqa: E402

__all__ = ["CType", "MethodId", "Registry", "RegistryEntry", "encode_method_id",
           "load_registry", "lookup", "__version__"]
