"""Init the library and import the public API.

Usage::

  from congestcut.all import *

"""

import congestcut as _congestcut
_congestcut.init()

from .base.all import *
from .walks.all import *
from .cuts.all import *
