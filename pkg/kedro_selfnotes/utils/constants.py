"""Package for storing constants."""

import os


MAX_WORKERS = int(os.environ.get("NOTES_NUM_THREADS", os.cpu_count() or 1))
"""Maximum number of worker threads for per-sample work."""
MAX_REROLLS = 1000
"""World rerolls tried before a generator gives up."""
MANIFEST_HASH_LENGTH = 16
"""Hex characters kept from the manifest digest."""
