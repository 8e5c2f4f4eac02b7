from ._constants import *
from ._errors import *
from ._logger import *
