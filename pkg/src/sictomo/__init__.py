from sictomo._utils._tools import _sictomo_version

__version__ = _sictomo_version()

from .qcore import *
from .circuit import *
from .tomo import *
from .fisher import *
from .optim import *
from .experiment import *
