"""Allow ``python -m phasedrift``."""

import sys

from phasedrift.cli import main

sys.exit(main())
