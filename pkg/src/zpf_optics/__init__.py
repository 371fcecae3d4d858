"""Deterministic Monte-Carlo simulator and closed-form analytics for
classical zero-point-field models of delayed-choice optics experiments."""

__version__ = "0.1.0"

from .core import DrawAddress, GlobalConfig, JonesVector  # noqa: F401
from .detect import (Always, And, Click, NoClick, Not, Or, Predicate,  # noqa: F401
                     RunStats, visibility, wilson_interval)
from .dsl import (DslError, ExperimentSpec, SweepRange, expand_sweeps,  # noqa: F401
                  parse, to_text)
from .builtins import BUILTIN_NAMES, builtin, builtin_text  # noqa: F401
from .engine import (DegenerateDenominatorError, EvaluationError,  # noqa: F401
                     count_events, run_ensemble, run_patterns, run_trial)
