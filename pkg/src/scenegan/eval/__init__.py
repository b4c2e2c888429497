from .ablation import ALL_VARIANTS, AblationError, AblationReport, ablation_compare, toy_color_error
from .edits import (
    ADD,
    REMOVE,
    EditError,
    EditScript,
    LayoutEdit,
    apply_edit_script,
    edit_script_from_json,
    edit_script_to_json,
    load_edit_script,
    save_edit_script,
)
from .grids import GridError, GridReport, export_grid, load_sidecar, render_montage
from .nearest import NearestError, l1_distance, nearest_training_image
from .sweeps import SweepError, SweepRequest, attribute_sweep, noise_grid, regenerate_grid

__all__ = [name for name in dir() if not name.startswith("_")]
