"""Critical-orbit invariants of one-parameter complex polynomial families."""
__version__ = "0.1.0"
