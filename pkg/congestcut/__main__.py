
import sys

from congestcut import cli


sys.exit(cli.main())
