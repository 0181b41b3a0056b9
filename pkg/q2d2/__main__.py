import sys

from q2d2.pipeline.cli import main

sys.exit(main())
