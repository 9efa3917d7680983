from . import families
from . import divisibility
from .families import (ChannelFamily, OscillatoryDephasing, builtin_family, parse_family, depolarizing_semigroup,
                       oscillatory_dephasing)
from .divisibility import DivisibilityReport, propagator, propagator_norm, g_dia, i_dia, sup_dia
