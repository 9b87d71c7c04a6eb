"""Processing tools for SAR / multispectral fusion."""
from .patch_tools import build_patch_grid, extract_patches, center_patches, reassemble_scalar, reassemble_values
from .brovey_tools import brovey_transform, brovey_fuse
from .sparse_tools import omp, joint_code
from .dictionary_tools import init_dictionary, train
from .fusion_tools import select_patch_labels, build_mask, blend
from .metric_tools import metrics_report
from .baseline_tools import pca_fuse, hsv_fuse
