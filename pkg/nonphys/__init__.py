from . import linalg
from . import sdp
from . import channels
from . import measures
from . import nonmarkov
from . import core
from .exceptions import NonphysError, InputError, DimensionError, HermiticityError, DomainError, SingularMapError, SolverError

__version__ = '0.1.0'
