"""Repair and resolution enhancement of snapshot datasets via truncated SVD/HOSVD."""

from .analysis import (
    ReconstructionReport,
    build_report,
    component_errors,
    error_pdf,
    normalize_errors,
    rrmse,
    worst_snapshot,
    write_error_map_pgm,
)
from .decomposition import (
    RankRule,
    TruncatedSVD,
    TuckerDecomposition,
    hosvd,
    hosvd_reconstruct,
    load_factorization,
    mode_product,
    numerical_rank,
    save_factorization,
    select_rank,
    svd_reconstruct,
    svd_truncated,
)
from .gappy import (
    GappyConfig,
    RepairDivergenceError,
    RepairResult,
    gappy_repair,
    initial_fill,
    mse_gaps,
)
from .mft import export_csv, read_mft, write_mft
from .superres import SuperresConfig, interpolate_initial, place_on_target, superresolve
from .synthetic import (
    WaveMode,
    WaveSpec,
    expected_rank,
    generate,
    generate_cylinder_like,
    generate_standing_waves,
    load_spec,
    save_spec,
)
from .tensors import (
    downsample,
    downsample_positions,
    fold,
    gap_fraction,
    inject_gaps,
    mode_unfold,
    spatial_axes,
    unfold,
)

__version__ = "0.1.0"
