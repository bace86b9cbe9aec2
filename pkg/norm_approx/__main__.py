import sys

from norm_approx.reporting.cli import main

sys.exit(main())
