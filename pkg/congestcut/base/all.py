from . engine import *
from . graph import *
from . tree import *
