"""Space-filling-curve scan orders over grids, coverage metrics for them,
and a small selective state-space scan that consumes the reordered data."""

from fractalscan.curves import (
    DEFAULT_WINDOW,
    FAMILIES,
    GridShape,
    ScanOrder,
    apply_order,
    as_shape,
    continuous_order,
    hilbert_order,
    invert_order,
    local_order,
    make_order,
    peano_order,
    raster_order,
)
from fractalscan.experiments import (
    HolderField,
    make_holder_field,
    nearest_neighbor_interpolate,
    psnr,
    run_interp_study,
)
from fractalscan.metrics import (
    SampleSet,
    box_counting_dimension,
    dispersion,
    jump_statistics,
    metric_report,
    prefix_samples,
    strided_samples,
)
from fractalscan.ssm import (
    ContinuousSSM,
    DiscreteSSM,
    SelectiveParams,
    discretize_zoh,
    scan_over_grid,
    scan_recurrence,
    selective_scan,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_WINDOW",
    "FAMILIES",
    "ContinuousSSM",
    "DiscreteSSM",
    "GridShape",
    "HolderField",
    "SampleSet",
    "ScanOrder",
    "SelectiveParams",
    "apply_order",
    "as_shape",
    "box_counting_dimension",
    "continuous_order",
    "discretize_zoh",
    "dispersion",
    "hilbert_order",
    "invert_order",
    "jump_statistics",
    "local_order",
    "make_holder_field",
    "make_order",
    "metric_report",
    "nearest_neighbor_interpolate",
    "peano_order",
    "prefix_samples",
    "psnr",
    "raster_order",
    "run_interp_study",
    "scan_over_grid",
    "scan_recurrence",
    "selective_scan",
    "strided_samples",
    "__version__",
]
