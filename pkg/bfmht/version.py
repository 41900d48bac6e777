# -*- coding: utf-8 -*-
"""
Version management for bfmht.

The version comes from installed package metadata, with the short git hash
appended when running from a checkout.
"""

import functools
import logging
import os
import subprocess
from typing import Optional, Tuple

logger = logging.getLogger(__name__)


def _get_local_version() -> str:
    """Get version from installed package metadata."""
    try:
        from importlib.metadata import version as get_version

        return get_version("bfmht")
    except Exception:
        return "0.0.0-dev"


@functools.lru_cache(maxsize=1)
def _get_git_hash() -> Tuple[Optional[str], Optional[str]]:
    """Get the current git commit hash."""
    script_path = os.path.dirname(os.path.realpath(__file__))
    try:
        git_hash = subprocess.check_output(
            ["git", "rev-parse", "HEAD"],
            cwd=script_path,
            stderr=subprocess.STDOUT,
            universal_newlines=True,
        ).strip()
        return git_hash, git_hash[:7]
    except Exception as e:
        logger.debug(f"No git hash available: {e}")
        return None, None


def get_version(include_git_hash: bool = False) -> str:
    """
    Get the current bfmht version.

    Args:
        include_git_hash: If True, append the short git hash to the version

    Returns:
        Version string (e.g., "1.0.0" or "1.0.0 (abc1234)")
    """
    version = _get_local_version()
    if include_git_hash:
        _, git_hash_short = _get_git_hash()
        if git_hash_short:
            version = f"{version} ({git_hash_short})"
    return version


def get_version_info() -> dict:
    """Version details for the CLI banner and JSON sidecars."""
    git_hash, git_hash_short = _get_git_hash()
    return {
        "version": _get_local_version(),
        "git_hash": git_hash,
        "git_hash_short": git_hash_short,
    }


version = get_version()
__version__ = version
