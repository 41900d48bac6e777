# -*- coding: utf-8 -*-
"""
Butterfly-compressed manifold harmonic transforms.
"""
from bfmht.version import __version__, get_version, get_version_info, version

__all__ = ["version", "__version__", "get_version", "get_version_info"]
