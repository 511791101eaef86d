from __future__ import annotations

import sys

from codbench.cli import main

sys.exit(main())
