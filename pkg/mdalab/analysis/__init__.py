# Licensed under the MIT License.

from mdalab.analysis.fit import AnalysisFamily, AnalysisFit, AnalysisSpec, fit_analysis
from mdalab.analysis.pooling import PooledResult, rubin_pool, significance_band
from mdalab.analysis.scenarios import TRUE_PARAMETERS, simulate_full_scenario, simulate_scenario
