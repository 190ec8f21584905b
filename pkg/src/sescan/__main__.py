import sys

from sescan.cli import main

sys.exit(main())
