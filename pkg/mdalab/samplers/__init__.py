# Licensed under the MIT License.

from mdalab.samplers.mh import AcceptanceTracker, GaussianPrior, MhTuning, adapt_tuning, mh_update_beta, rw_mh_lognu
from mdalab.samplers.normal_gamma import draw_normal_gamma
from mdalab.samplers.rng import RngStream
from mdalab.samplers.variates import draw_g_exp_inv, draw_positive_normal
