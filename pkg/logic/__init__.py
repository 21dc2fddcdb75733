from .formula import *
from .analysis import *
from .parser import *
from .transs import *
