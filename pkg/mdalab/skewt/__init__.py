# Licensed under the MIT License.

"""Skew-normal and skew-t regression."""
