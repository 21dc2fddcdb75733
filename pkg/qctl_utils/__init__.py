from .config import *
from .errors import *
from .logger import *
