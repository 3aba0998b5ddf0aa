class CapExceeded(RuntimeError):
    """An enumeration or count would exceed its resource cap (override with ``force``)."""
