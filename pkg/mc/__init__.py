from .ctl_fixpoint import *
from .mc_structure import *
from .mc_tree import *
