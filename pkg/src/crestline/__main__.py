"""Allow ``python -m crestline``."""

from crestline.cli import main

raise SystemExit(main())
