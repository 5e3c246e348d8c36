"""Two-stage stochastic bi-objective planning of exploration well portfolios."""

from .domain import ProjectCatalog, load_catalog, save_catalog, validate_catalog
from .evaluator import EvaluationReport, evaluate
from .nsga2 import SearchConfig, run
from .scenarios import ScenarioBank, build_bank

__all__ = [
    "EvaluationReport",
    "ProjectCatalog",
    "ScenarioBank",
    "SearchConfig",
    "build_bank",
    "evaluate",
    "load_catalog",
    "run",
    "save_catalog",
    "validate_catalog",
]

__version__ = "0.1.0"
