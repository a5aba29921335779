import sys

from lifnet.cli import main

sys.exit(main())
