# Licensed under the MIT License.
