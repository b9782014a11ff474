"""Local search for SONET ring design: SRAP (node partitioning) and IDP (edge partitioning)."""
from .instance import Edge, Instance, generate_goldschmidt, generate_lee, parse_instance, serialize_instance
from .kernels import BACKEND
from .model import IdpSolution, LoadReport, SrapSolution, idp_lower_bound, srap_lower_bound
from .objective import EvalContext, ObjectiveSpec, evaluate
from .search import RunResult, SearchConfig, dmn, dmn2, restart_driver, run_search, solve, tabu_search

__version__ = "0.1.0"
