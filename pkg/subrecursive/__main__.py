import sys

from subrecursive.cli import main

sys.exit(main())
