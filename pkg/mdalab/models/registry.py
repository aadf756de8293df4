# Licensed under the MIT License.

from mdalab.data.schema import VariableKind, VisitType
from mdalab.models.base import Family, FamilyKind
from mdalab.models.categorical import LogisticFamily, MultiLogitFamily, PropOddsFamily
from mdalab.models.continuous import NormalFamily, SkewNormalFamily, SkewTFamily
from mdalab.models.counts import NegBinomialFamily, PoissonFamily
from mdalab.utils.status import ConfigurationError


class FamilyRegistry:
    def __init__(self):
        self.FAMILY_REGISTRY = {
            FamilyKind.NORMAL: NormalFamily,
            FamilyKind.SKEW_NORMAL: SkewNormalFamily,
            FamilyKind.SKEW_T: SkewTFamily,
            FamilyKind.LOGISTIC: LogisticFamily,
            FamilyKind.PROP_ODDS: PropOddsFamily,
            FamilyKind.MULTI_LOGIT: MultiLogitFamily,
            FamilyKind.POISSON: PoissonFamily,
            FamilyKind.NEG_BINOMIAL: NegBinomialFamily,
        }
        # Families admissible for each variable kind; the first one is the default.
        self.COMPATIBLE = {
            VariableKind.CONTINUOUS: [FamilyKind.NORMAL, FamilyKind.SKEW_NORMAL, FamilyKind.SKEW_T],
            VariableKind.BINARY: [FamilyKind.LOGISTIC, FamilyKind.PROP_ODDS, FamilyKind.MULTI_LOGIT],
            VariableKind.ORDINAL: [FamilyKind.PROP_ODDS, FamilyKind.MULTI_LOGIT],
            VariableKind.NOMINAL: [FamilyKind.MULTI_LOGIT],
            VariableKind.COUNT: [FamilyKind.POISSON, FamilyKind.NEG_BINOMIAL],
        }

    def get_family(self, kind: FamilyKind | str, n_predictors: int, levels: int | None = None) -> Family:
        try:
            family_cls = self.FAMILY_REGISTRY[FamilyKind(kind)]
        except (KeyError, ValueError) as exc:
            raise ConfigurationError(f"unknown family {kind!r}") from exc
        return family_cls(n_predictors, levels)

    def get_family_kinds(self) -> list[str]:
        return [kind.value for kind in self.FAMILY_REGISTRY]

    def default_kind(self, visit: VisitType) -> FamilyKind:
        return self.COMPATIBLE[visit.kind][0]

    def check_compatible(self, kind: FamilyKind, visit: VisitType) -> None:
        if kind not in self.COMPATIBLE[visit.kind]:
            allowed = ", ".join(k.value for k in self.COMPATIBLE[visit.kind])
            raise ConfigurationError(
                f"family {kind.value!r} does not match {visit.kind.value} visit (allowed: {allowed})",
                field=f"model.visits.{visit.name}.family",
            )

    def for_visit(self, visit: VisitType, n_predictors: int, kind: FamilyKind | None = None) -> Family:
        kind = self.default_kind(visit) if kind is None else FamilyKind(kind)
        self.check_compatible(kind, visit)
        return self.get_family(kind, n_predictors, visit.levels)
