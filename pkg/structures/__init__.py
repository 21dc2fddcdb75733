from .kripke import *
from .trees import *
