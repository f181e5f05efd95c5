from __future__ import annotations

import sys

from lumaca.cli.app import main

sys.exit(main())
