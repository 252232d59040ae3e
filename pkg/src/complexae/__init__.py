"""Complex-valued autoencoders with widely linear layers and CR gradients."""

__version__ = "0.1.0"

from .backend import backend_name
from .errors import (BadMagicError, ComplexAEError, ConfigError,
                     CountMismatchError, DataError, DivergenceError,
                     EvaluationError, IdxParseError, ShapeError,
                     SingularityError, TruncatedFileError)
from .gradcheck import (GradCheckReport, check_network_gradients,
                        numeric_cost_gradients, numeric_cr_pair)
from .linalg import (AugmentedMatrix, RealCompositeTransform,
                     from_real_composite, strictly_linear, to_real_composite,
                     widely_linear)
from .losses import (CostKind, CostResult, evaluate, factorize_mse, mse,
                     normalized_mse, phase_amplitude)
from .network import (ACTIVATIONS, MODES, LayerParams, Network,
                      init_xavier, load_checkpoint, save_checkpoint)
from .spectra import (HalfSpectrumCodec, PixelPairCodec, phase_swap, psnr,
                      write_pgm)
from .dataio import (RunLog, fixture_dataset, load_dataset, load_idx_images,
                     load_idx_labels, read_run_csv, resolve_dataset,
                     sample_per_class, synthesize_dataset, write_run_csv)
from .trainer import (AlphaSweepReport, ExperimentConfig, StabilityReport,
                      compare_stability, derive_seed, match_parameter_counts,
                      sweep_alpha, train)

__all__ = [
    "ACTIVATIONS", "MODES", "AlphaSweepReport", "AugmentedMatrix",
    "BadMagicError", "ComplexAEError", "ConfigError", "CostKind", "CostResult",
    "CountMismatchError", "DataError", "DivergenceError", "EvaluationError",
    "ExperimentConfig", "GradCheckReport", "HalfSpectrumCodec", "IdxParseError",
    "LayerParams", "Network", "PixelPairCodec", "RealCompositeTransform",
    "RunLog", "ShapeError", "SingularityError", "StabilityReport",
    "TruncatedFileError", "backend_name", "check_network_gradients",
    "compare_stability", "derive_seed", "evaluate", "factorize_mse",
    "fixture_dataset", "from_real_composite", "init_xavier", "load_checkpoint",
    "load_dataset", "load_idx_images", "load_idx_labels",
    "match_parameter_counts", "mse", "normalized_mse", "numeric_cost_gradients",
    "numeric_cr_pair", "phase_amplitude", "phase_swap", "psnr",
    "read_run_csv", "resolve_dataset", "sample_per_class", "save_checkpoint",
    "strictly_linear", "sweep_alpha", "synthesize_dataset", "to_real_composite",
    "train", "widely_linear", "write_pgm", "write_run_csv",
]
