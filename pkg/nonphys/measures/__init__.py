from . import programs
from . import norms
from . import simulation
from . import spa
from . import games
from . import bounds
from .norms import (MeasureResult, evaluate, diamond_norm, base_norm_cptni, robustness_R, robustness_Rprime,
                    robustness_Rdoubleprime, simulation_cost, simulation_cost_result, channel_distance,
                    mitigation_cost)
from .simulation import SimulationPlan, build_simulation, verify_simulation, quasiprobability_decomposition
from .spa import spa, spa_prime
from .games import Game, game_advantage, game_from_witness, payoff, best_cptp_payoff, game_operator
from .bounds import (Bound, BoundsReport, bounds_trace_norm, bounds_upper, bounds_lower, approx_inverse_bounds,
                     bloch_oracle)
