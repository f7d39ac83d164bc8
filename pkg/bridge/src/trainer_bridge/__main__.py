"""Allow ``python -m trainer_bridge``."""

import sys

from .cli import main

sys.exit(main())
