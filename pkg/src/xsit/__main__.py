"""Allow ``python -m xsit``."""

import sys

from .cli import main

sys.exit(main())
