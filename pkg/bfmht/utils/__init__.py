# -*- coding: utf-8 -*-
"""
Shared helpers: YAML presets and the thread pool used by parallel regions.
"""
