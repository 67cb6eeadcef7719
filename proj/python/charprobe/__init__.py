"""Tokenizer construction, corpus transforms and character-inclusion probes.

The heavy lifting lives in the compiled extension; this package re-exports
its surface.
"""

from charprobe._charprobe import *  # noqa: F401,F403
from charprobe._charprobe import __doc__  # noqa: F401

__version__ = "1.0.0"
