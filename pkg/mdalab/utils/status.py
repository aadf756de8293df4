# Licensed under the MIT License.

"""Utility functions for handling status and errors."""

from enum import IntEnum

from colorama import Fore, Style

from mdalab.paths import config


class ExitCode(IntEnum):
    SUCCESS = 0
    USAGE_ERROR = 2
    DATA_ERROR = 3
    NUMERICAL_FAILURE = 4


class MdaLabError(Exception):
    exit_code = ExitCode.USAGE_ERROR


class ConfigurationError(MdaLabError):
    exit_code = ExitCode.USAGE_ERROR

    def __init__(self, message, field=None):
        prefix = f"{field}: " if field else ""
        super().__init__(f"Invalid configuration: {prefix}{message}")
        self.message = message
        self.field = field


class DataError(MdaLabError):
    exit_code = ExitCode.DATA_ERROR


class ParseError(DataError):
    def __init__(self, row, column, value):
        super().__init__(f"Cannot parse value {value!r} at row {row}, column {column!r}")
        self.row = row
        self.column = column
        self.value = value


class DomainError(DataError):
    def __init__(self, column, value, reason):
        super().__init__(f"Value {value!r} in {column!r} is out of domain: {reason}")
        self.column = column
        self.value = value
        self.reason = reason


class SchemaError(DataError):
    def __init__(self, column, reason):
        super().__init__(f"Schema error for column {column!r}: {reason}")
        self.column = column
        self.reason = reason


class NumericalError(MdaLabError):
    exit_code = ExitCode.NUMERICAL_FAILURE


class DecompositionError(NumericalError):
    def __init__(self, what):
        super().__init__(f"Matrix is not positive definite: {what}")
        self.what = what


class SeparationError(NumericalError):
    def __init__(self, visit):
        super().__init__(f"Complete or quasi-complete separation when fitting {visit!r}")
        self.visit = visit


class ConvergenceError(NumericalError):
    def __init__(self, visit, detail=""):
        suffix = f" ({detail})" if detail else ""
        super().__init__(f"Maximum likelihood fit for {visit!r} did not converge{suffix}")
        self.visit = visit
        self.detail = detail


class SingularDesignError(NumericalError):
    def __init__(self, rank, columns):
        super().__init__(f"Design matrix is rank deficient: rank {rank} < {columns} columns")
        self.rank = rank
        self.columns = columns


class RunPrint:
    def __init__(self):
        self.enable_printing = config.get("print_results")

    def step(self, message):
        if self.enable_printing:
            print(f"{Fore.GREEN}mdalab: {Style.RESET_ALL}{message}")

    def warning(self, message):
        if self.enable_printing:
            print(f"{Fore.YELLOW}Warning: {Style.RESET_ALL}{message}")

    def result(self, results):
        print(f"{Fore.MAGENTA}Results:\n{Style.RESET_ALL}{results}")
