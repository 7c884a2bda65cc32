import sys

from vexgame.cli import main

sys.exit(main())
