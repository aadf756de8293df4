# Licensed under the MIT License.

"""mdalab CLI entry point for running from a source checkout."""

import sys

from mdalab.cli import main

if __name__ == "__main__":
    sys.exit(main())
