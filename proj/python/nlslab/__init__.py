"""Python bindings for the nlslab C++ core."""

from ._nlslab import *  # noqa: F401,F403
from ._nlslab import __version__, NlslabError  # noqa: F401
