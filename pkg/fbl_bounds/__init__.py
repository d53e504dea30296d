__all__ = [
    "cli",
    "workflow",
    "bounds_api",
    "channels",
    "laplace",
    "waterfill",
    "state",
]
