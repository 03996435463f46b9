import sys

from oslo.cli import main

sys.exit(main())
