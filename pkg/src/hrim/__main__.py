import sys

from hrim.cli import main

sys.exit(main())
