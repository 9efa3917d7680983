from . import maps
from . import library
from . import io
from .maps import (LinearMapRep, Classification, from_choi, from_kraus, from_function, apply, compose,
                   tensor, inverse, pseudo_inverse, classify, to_transfer, from_transfer, output_trace,
                   hermitian_split, difference, add, scale, complete_to_tp, is_cp, is_trace_preserving)
from .library import builtin, BUILTINS
from .io import parse_builtin, parse_query, parse_channel_source, load_channel, dump_channel
