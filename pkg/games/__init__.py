from .parity import *
