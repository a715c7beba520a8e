"""SL(2,C) representations of knot groups built from tangle decompositions."""

__version__ = "0.1.0"

from .errors import CharvarError  # noqa: E402
from .knots import KNOTS, Slope, WirtingerRep, build_rep, builtin_diagram  # noqa: E402
from .tangles import Tangle, parse_tangle  # noqa: E402

__all__ = ["CharvarError", "KNOTS", "Slope", "Tangle", "WirtingerRep", "__version__", "build_rep", "builtin_diagram", "parse_tangle"]
