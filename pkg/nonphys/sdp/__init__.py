from . import realify
from . import program
from . import solver
from . import certificate
from .program import ConeProgram, ProgramBuilder, Block, dump_programs
from .solver import SolverConfig, Solution, Status, solve
from .certificate import verify_certificate, CertificateReport
