"""Variable-length channel quantization for outage-limited MISO beamforming."""

from ._vlcq import *  # noqa: F401,F403
from ._vlcq import __doc__  # noqa: F401
