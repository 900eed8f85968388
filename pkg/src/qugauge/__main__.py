import sys

from qugauge.cli import main

sys.exit(main())
