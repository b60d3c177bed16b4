"""EL image preprocessing: rotation/perspective correction, grid-pattern Hough
cell detection, and CUSUM one-cell extraction.

The heavy lifting lives in the compiled extension; this package re-exports it.
"""

from ._core import (  # noqa: F401
    ElprocError,
    ModuleSpec,
    __version__,
    canny_edges,
    correct_perspective,
    correct_rotation,
    cumulative_deltas,
    cusum,
    detect_cells,
    detect_pattern,
    extract_cell,
    golden_section_maximize,
    hough_line_segments,
    load_image,
    projections,
    render_module,
    rotate,
    rotation_objective,
    save_image,
    standardize,
    usan_edges,
)
