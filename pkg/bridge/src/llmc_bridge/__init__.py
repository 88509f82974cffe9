"""Model-serving bridge exposing next-token distributions over HTTP."""

from .backends import HFBackend, ModelBackend, StubBackend, softmax
from .server import create_app, serve

__version__ = "0.1.0"
