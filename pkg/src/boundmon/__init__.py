"""Model-bounded safety monitoring of sampled cyber-physical system logs."""

from .dynamics import UncertainLinearSystem, step, step_nominal, uncertainty_bloat
from .errors import BoundmonError, DimensionError, FeasibilityError, FormatError, InvalidSetError
from .flowpipe import Flowpipe, compute_flowpipe, first_unsafe, unsafe_times
from .formats import (
    export_plot_data,
    export_plot_svg,
    parse_mbeh,
    parse_mlog,
    parse_model,
    parse_unsafe,
    write_mbeh,
    write_mlog,
    write_model,
    write_unsafe,
)
from .geometry import (
    FEAS_TOL,
    Halfspace,
    IntervalBox,
    UnsafeSpec,
    Zonotope,
    affine_map,
    contains_point,
    from_interval,
    interval_hull,
    intersects,
    intersects_unsafe,
    minkowski_sum,
    order_reduce,
    support,
)
from .loggen import GenConfig, generate, generate_log, simulate_behavior
from .offline import (
    Log,
    Sample,
    Status,
    Verdict,
    Witness,
    hull_intersect_overapprox,
    monitor_offline,
    refine_segment,
)
from .online import Behavior, OnlineConfig, monitor_online, next_trigger

__version__ = "0.1.0"
