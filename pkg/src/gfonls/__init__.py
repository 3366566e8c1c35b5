"""Reflectionless soliton and breather solutions of a fifth-order NLS hierarchy
equation on a nonzero background."""
from __future__ import annotations

__version__ = "0.1.0"
