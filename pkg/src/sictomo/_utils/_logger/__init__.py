from ._sictomo_logger import *
