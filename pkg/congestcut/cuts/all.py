from . oracle import *
from . sparsecut import *
from . sweep import *
