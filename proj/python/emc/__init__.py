"""Epipolar-consistency rigid motion compensation: cost evaluation and compensation."""

from ._core import __version__, compensate, total_cost

__all__ = ["__version__", "compensate", "total_cost"]
