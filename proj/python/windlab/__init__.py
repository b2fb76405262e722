from ._windlab import *  # noqa: F401,F403
from ._windlab import __version__  # noqa: F401
