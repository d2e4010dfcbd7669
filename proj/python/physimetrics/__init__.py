"""Motion representation, kinematics, losses, and physical-plausibility metrics.

The heavy lifting lives in the compiled extension; this package re-exports it.
"""

try:
    from ._physimetrics import *  # noqa: F401,F403  (installed wheel layout)
    from ._physimetrics import __doc__  # noqa: F401
except ImportError:  # in-tree builds put the module on PYTHONPATH directly
    from _physimetrics import *  # noqa: F401,F403

__version__ = "0.1.0"
