"""Camera-radar BEV fusion data path and multi-object tracking (C++ core)."""

from ._fusetrack import *  # noqa: F401,F403
from ._fusetrack import __version__  # noqa: F401
