# Licensed under the MIT License.

"""Multiple imputation by monotone data augmentation."""

__version__ = "0.1.0"
