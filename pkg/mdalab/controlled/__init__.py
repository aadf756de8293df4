# Licensed under the MIT License.

from mdalab.controlled.mechanism import (
    MechanismKind,
    MechanismSpec,
    complete_all,
    complete_dropouts,
    generate_imputations,
    impute_dropout,
)
