"""
Internal implementation details. Do not import directly.

The numerical modules import ``sphere`` and ``utils`` from here, so the
package itself stays free of imports that lead back to them; ``check``
and ``registry`` are imported by their module paths.
"""

from .utils import parse_vector, serialize_data

__all__ = [
    "parse_vector",
    "serialize_data",
]
