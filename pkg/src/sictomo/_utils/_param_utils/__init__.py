from ._check_logger_parms import *
from ._check_parms import *
