from .pbf import *
from .word_automata import *
from .safra import *
from .tree_automata import *
