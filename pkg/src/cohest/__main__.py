import sys

from cohest.cli import main

sys.exit(main())
