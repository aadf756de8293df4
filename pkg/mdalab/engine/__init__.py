# Licensed under the MIT License.

from mdalab.engine.mda import impute_continuous_intermittent, impute_discrete_intermittent, run_mda, step_A1
from mdalab.engine.runner import MdaResult, run_chains
from mdalab.engine.spec import McmcConfig, ModelSpec, VisitModel, resolve_model
from mdalab.engine.state import ChainState, ParameterDraw
