import sys

from classical_sd.cli import main

sys.exit(main())
