from ._divctl import *  # noqa: F401,F403
from ._divctl import __version__  # noqa: F401
