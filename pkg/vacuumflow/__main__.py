import sys

from vacuumflow.main import main

sys.exit(main())
