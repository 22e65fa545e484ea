"""Allow ``python -m er2rds``."""

import sys

from .cli import main

sys.exit(main())
