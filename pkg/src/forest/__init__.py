"""forest: a reversible, always-terminating language with escapable loops."""

from .interp import (
    Failure,
    FuelExhausted,
    Program,
    State,
    StepStats,
    Success,
    eval_arith,
    eval_bool,
    run,
)
from .msrl import check_simulation, invert_msrl, run_msrl, translate, validate_msrl
from .parser import ParseError, SourceFile, parse_forest, parse_msrl, pretty_forest, pretty_msrl
from .syntax import dom, invert, lead, validate, wdom

__all__ = [
    "Failure", "FuelExhausted", "ParseError", "Program", "SourceFile", "State",
    "StepStats", "Success", "check_simulation", "dom", "eval_arith", "eval_bool",
    "invert", "invert_msrl", "lead", "parse_forest", "parse_msrl", "pretty_forest",
    "pretty_msrl", "run", "run_msrl", "translate", "validate", "validate_msrl", "wdom",
]
