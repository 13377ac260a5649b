"""HTTP facade over the circuit toolkit.

The handlers in `app` are plain functions over the pydantic models in
`models`; the CLI calls them in-process and `create_app` mounts the same
functions as endpoints.
"""

from .app import create_app

__all__ = ["create_app"]
