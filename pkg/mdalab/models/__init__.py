# Licensed under the MIT License.

from mdalab.models.base import Family, FamilyKind, FamilyParams, LinearPredictorContext
from mdalab.models.registry import FamilyRegistry
