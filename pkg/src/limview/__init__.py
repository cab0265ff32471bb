"""Limited-view circular Radon reconstruction with smoothing windows."""

from .analysis import (ArtifactCircle, EdgeProbe, artifact_amplitude, artifact_sharpness, edge_probe,
                       line_profile, measure_jump, predicted_artifact_circles, sigma0)
from .backprojection import ReconGrid, backproject, reconstruct
from .config import PRESETS, RunConfig
from .errors import (DegenerateTangent, EmptySampleSet, FormatError, GridOutsideDomain, IoFailure,
                     LimviewError, NonUniformGrid, NotInside, OutOfRange, ProbeOutsideGrid,
                     ValidationError)
from .filter import FilterPlan, filter_row, filter_row_oracle, filter_sinogram
from .geometry import (AcquisitionCurve, Arc, Covector, Visibility, classify_covector, curve_frame,
                       curve_point, ray_intersections)
from .io import read_image, read_sinogram, write_csv, write_image, write_sinogram
from .phantom import Disc, Phantom, RasterImage, circular_mean, default_disc, rasterize, sample_sinogram
from .sinogram import Sinogram
from .window import WindowSpec, eval_window, sample_window, verify_vanishing_order

__version__ = "0.1.0"
