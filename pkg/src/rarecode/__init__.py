"""Dictionary-learning image enhancement and rarity-based saliency.

The pipeline tiles a grayscale image into 8x8 blocks, learns an
overcomplete dictionary with sparse codes, scores how rarely each atom is
used, reweights atoms through a transform, and reconstructs either an
enhanced image or a saliency map.

Submodules follow the stages: :mod:`rarecode.imageio` (PGM I/O and block
tiling), :mod:`rarecode.coder` (OMP and ISTA sparse coding),
:mod:`rarecode.ksvd` (dictionary learning and serialization),
:mod:`rarecode.rarity` (usage statistics, scores, reweighting),
:mod:`rarecode.pipeline` (end-to-end operations and the baseline detector),
:mod:`rarecode.synthetic` (seeded scenes and benchmarks), and
:mod:`rarecode.cli`.
"""

from .coder import CoderConfig, encode_all, ista, omp, validate_dictionary
from .errors import (
    ContractViolationError,
    DictionaryFormatError,
    PgmError,
    PgmParseError,
    PgmTruncatedError,
)
from .imageio import (
    PatchGrid,
    from_patches,
    psnr,
    read_pgm,
    to_patches,
    validate_image,
    write_pgm,
)
from .ksvd import (
    LearnConfig,
    LearnReport,
    dictionary_from_bytes,
    dictionary_to_bytes,
    init_dictionary,
    ksvd_update,
    learn,
    load_dictionary,
    replace_unused_atoms,
    save_dictionary,
)
from .pipeline import (
    EnhanceResult,
    PipelineConfig,
    SaliencyEval,
    enhance,
    evaluate_saliency,
    itti_lite,
    patch_scores,
    rarity_weights,
    roc_auc,
    saliency_from_codes,
    saliency_map,
)
from .rarity import (
    ActivationStats,
    RarityMeasure,
    TransformSpec,
    activation_stats,
    reweight_dictionary,
)

__version__ = "0.1.0"

__all__ = [
    "ActivationStats",
    "CoderConfig",
    "ContractViolationError",
    "DictionaryFormatError",
    "EnhanceResult",
    "LearnConfig",
    "LearnReport",
    "PatchGrid",
    "PgmError",
    "PgmParseError",
    "PgmTruncatedError",
    "PipelineConfig",
    "RarityMeasure",
    "SaliencyEval",
    "TransformSpec",
    "activation_stats",
    "dictionary_from_bytes",
    "dictionary_to_bytes",
    "encode_all",
    "enhance",
    "evaluate_saliency",
    "from_patches",
    "init_dictionary",
    "ista",
    "itti_lite",
    "ksvd_update",
    "learn",
    "load_dictionary",
    "omp",
    "patch_scores",
    "psnr",
    "rarity_weights",
    "read_pgm",
    "replace_unused_atoms",
    "reweight_dictionary",
    "roc_auc",
    "saliency_from_codes",
    "saliency_map",
    "save_dictionary",
    "to_patches",
    "validate_dictionary",
    "validate_image",
    "write_pgm",
]
