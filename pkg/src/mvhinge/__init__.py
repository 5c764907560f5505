"""Mitral valve hinge point extraction and evaluation toolkit.

Takes LV/LA segmentation label maps of echocardiograms (CAMUS-style
MetaImage files), extracts the mitral valve hinge points from the LV-LA
contact line, and provides the statistical machinery to evaluate such
measurements: Dice scoring, signed per-axis errors, Shapiro-Wilk
normality screening, median-bias calibration, and percentile reports.
"""

from .errors import (
    BadValue,
    CompressedPayload,
    EmptySamples,
    LengthMismatch,
    MhdError,
    MissingCell,
    MissingKey,
    MvHingeError,
    NoContact,
    ShapeMismatch,
    SpacingMismatch,
    SpecOutOfBounds,
    StatsError,
    TooFewSamples,
    TooManySamples,
    UnknownLabel,
    UnsafeDataFile,
    UnsupportedDims,
    UnsupportedElementType,
    ZeroVariance,
)
from .hinge import (
    CenteringDiagnosis,
    ContactLine,
    HingePair,
    diagnose_centering,
    extract_contact_line,
    extract_hinge_points,
    make_hinge_pair,
    mv_diameter,
)
from .kernels import BACKEND
from .labelmap import (
    BG,
    LA,
    LV,
    Component,
    DiceSummary,
    LabelMap,
    connected_components,
    dice,
    dice_cohort,
)
from .mhd_io import (
    CAMUS_GT_MAPPING,
    RAW012_MAPPING,
    ImageMeta,
    load_label_map,
    parse_mhd_header,
    read_label_map,
    save_label_map,
    write_label_map,
)
from .phantom import (
    ErrorModel,
    PhantomSpec,
    generate_cohort,
    generate_phantom,
)
from .stats import (
    ALL_SUBGROUPS,
    CalibrationTable,
    ErrorSample,
    Subgroup,
    SummaryReport,
    SummaryRow,
    apply_calibration,
    compute_errors,
    fit_calibration,
    percentile,
    shapiro_wilk,
    summarize,
)

__version__ = "0.1.0"
