import sys

from ringstar.cli import main

sys.exit(main())
