"""Render relpoly locus tiles into static figures.

Consumes only the published CSV/JSON formats (schemas shipped alongside);
it has no dependency on the computing package.  Three figure kinds: `atlas`
(zero scatter over the unit disk), `heatmap` (activity-scan grid), and
`curve` (pentagon circle values with the threshold crossing marked).
"""

from .tiles import TileSet, TileError, load_curve
from .render import render

__all__ = ["TileSet", "TileError", "load_curve", "render"]

__version__ = "0.1.0"
