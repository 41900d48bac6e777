#!/usr/bin/env python
"""
bfmht preset configuration.

Defaults are read from ``config_defaults.yaml`` into module globals; user
config files loaded later overwrite them key by key.
"""

from __future__ import annotations

import collections.abc
import inspect
import io
import logging
import os
from typing import Any, Dict, Iterable, Optional

import yaml
from environs import Env

import bfmht

logger = logging.getLogger(__name__)
env = Env()

BFMHT_DIR = os.path.dirname(os.path.realpath(inspect.getfile(bfmht)))

density_presets: Dict[str, str] = {}
csv_columns: Dict[str, list] = {}
norm_power_iterations: int = 10

searchp_fn = os.path.join(BFMHT_DIR, "utils", "config_defaults.yaml")
with io.open(searchp_fn) as f:
    configs = yaml.safe_load(f)
    for c, v in list(configs.items()):
        globals()[c] = v


# Config files are loaded in a fixed order and later values overwrite earlier ones.
def load_userconfig(paths: Iterable[str] = ()) -> None:
    """
    Overwrite config defaults with user config files.
    """
    load_config(os.path.join(os.path.dirname(BFMHT_DIR), "bfmht_config.yaml"))
    load_config(os.path.expanduser("~/.bfmht_config.yaml"))
    config_path = env.str("BFMHT_CONFIG_PATH", None)
    if config_path is not None:
        load_config(config_path)
    load_config("bfmht_config.yaml")
    for p in paths:
        load_config(p)


def load_config(yaml_config: str) -> None:
    """
    Load and parse a config file if we find it.
    """
    if os.path.isfile(yaml_config):
        try:
            with io.open(yaml_config) as f:
                new_config = yaml.safe_load(f)
            logger.debug(f"Loading config settings from: {yaml_config}")
            add_config(new_config or {})
        except (IOError, AttributeError) as e:
            logger.debug(f"Config error: {e}")
        except yaml.YAMLError as e:
            logger.error(f"Error parsing config YAML: {e}")
    else:
        logger.debug(f"No bfmht config found: {yaml_config}")


def add_config(conf: Dict[str, Any]) -> None:
    """
    Add to the global config with given bfmht config dict.
    """
    for c, v in list(conf.items()):
        logger.debug(f"New config '{c}': {v}")
        update_dict(globals(), {c: v})


def update_dict(d: Dict[str, Any], u: Dict[str, Any]) -> Dict[str, Any]:
    """
    Recursively updates nested dict d from nested dict u.
    """
    for key, val in list(u.items()):
        if isinstance(val, collections.abc.Mapping):
            d[key] = update_dict(d.get(key, {}), val)
        else:
            d[key] = u[key]
    return d


def density_preset(name: str) -> Optional[str]:
    """Look up a named density string, or None."""
    return density_presets.get(name)
