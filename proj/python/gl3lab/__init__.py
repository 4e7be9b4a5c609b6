"""Coefficient tables, error terms and random models for degree-three L-functions."""

try:
    from . import _gl3lab
except ImportError:  # in-tree build: the extension sits next to, not inside, the package
    import _gl3lab

globals().update({k: v for k, v in vars(_gl3lab).items() if not k.startswith("__")})

__version__ = "0.1.0"
