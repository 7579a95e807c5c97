"""Figure pipeline over adepth CSV logs: it reads the logging contract,
never the library, so it stays decoupled from the simulator."""

from .figures import (
    DEPTH_DISPLAY_CAP,
    FigureSpec,
    depth_display,
    render_comparison,
    render_depth_track,
    render_trajectory,
)
from .reader import MissingColumnError, load_log, require_columns, strategy_label

__version__ = "0.1.0"
