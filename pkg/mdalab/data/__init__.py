# Licensed under the MIT License.

from mdalab.data.dataset import Dataset, SubjectRecord, load_dataset, save_dataset
from mdalab.data.missingness import MissingnessPartition, classify_missingness, sort_monotone
from mdalab.data.schema import ColumnSchema, VariableKind, VisitType
