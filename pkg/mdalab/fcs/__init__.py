# Licensed under the MIT License.

from mdalab.fcs.pipeline import draw_sequential, fcs_draws, fcs_mnar_pipeline
from mdalab.fcs.spec import FcsConditional, FcsModelSpec, resolve_conditionals
from mdalab.fcs.sweep import draw_parameters, fcs_sweep
