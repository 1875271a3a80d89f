import sys

from rps.main import run

sys.exit(run())
