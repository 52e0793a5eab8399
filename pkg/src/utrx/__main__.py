"""Entry point for ``python -m utrx``."""

import sys

from utrx.harness.cli import main

sys.exit(main())
