import sys

from finsler.cli import main

sys.exit(main())
