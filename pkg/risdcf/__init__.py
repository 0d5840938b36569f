'''
risdcf models and simulates relay channel access with reconfigurable
intelligent surfaces: the link efficiency of an RIS, the closed-form
saturation throughput of RIS-assisted and conventional multi-hop relaying,
and a discrete-event simulation of the protocol that reserves RIS links.
'''

__version__ = '0.1.0'
## Import all  module names for coherent reference of name-space


from . import constants
from . import mathFunctions
from . import util
from . import channel
from . import timing
from . import analytic
from . import frame
from . import protocol
from . import topology
from . import simulation
from . import io
from . import experiments


# Import contents into current namespace for ease of calling
from .mathFunctions import *
from .util import *
from .channel import *
from .timing import *
from .analytic import *
from .frame import *
from .protocol import *
from .topology import *
from .simulation import *
from .io import *
from .experiments import *


## Shorthand Names
MT = MacTimings
CP = ChannelParams
