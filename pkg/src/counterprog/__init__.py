"""Counter programs, their reachability semantics and test-postponing gadgets."""

from .fastmath import BudgetExceeded, EvalFState, evalf_max, evalf_step, fg_f, fg_f_vec
from .gadgets import (
    GoodConfigLayout,
    PreamplifierSpec,
    build_ack,
    build_ack_reduced,
    build_evalf,
    build_evalf_branch,
    build_loop_at_most,
    build_simtest,
    build_trivial_preamplifier,
    build_update_b,
    compose,
)
from .ir import Configuration, Program, classify, counters, dimension, parse, render, size
from .semantics import ExplorationPolicy, check_reach, denotational_relation, reach_set
from .vass import VassSystem, export_vass

__version__ = "0.1.0"
