"""Near-field massive MIMO channel simulator."""

import json

from ._nfmimo import *  # noqa: F401,F403
from ._nfmimo import EXPERIMENTS, __version__, run_experiment as _run_experiment


def run_experiment(kind, cfg, out, **kwargs):
    """Run one experiment and return its manifest as a dict."""
    return json.loads(_run_experiment(kind, cfg, str(out), **kwargs))
