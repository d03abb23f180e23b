from . pagerank import *
from . randomwalk import *
