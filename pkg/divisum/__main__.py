import sys

from divisum.main import main

sys.exit(main())
