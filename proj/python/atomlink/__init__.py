"""Atom-photon entanglement link model (compiled core)."""

import os as _os
from pathlib import Path as _Path

_presets = _Path(__file__).resolve().parent / "presets"
if _presets.is_dir():
    _os.environ.setdefault("ATOMLINK_CONFIG_DIR", str(_presets))

from ._atomlink import *  # noqa: E402,F401,F403
from ._atomlink import ConfigError, FitError, ParameterError, SingularityError  # noqa: E402,F401

__all__ = [name for name in dir() if not name.startswith("_")]
