"""Self-Notes workbench: note-interleaved decoding on synthetic reasoning tasks."""

__version__ = "0.1.0"
