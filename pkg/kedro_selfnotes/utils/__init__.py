"""Package for helpers shared across the workbench."""
