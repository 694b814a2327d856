import sys

from seqwitness.cli import main

sys.exit(main())
