"""memhd: multi-centroid hyperdimensional classification sized to
in-memory-computing arrays, plus the array mapping cost model.

The pipeline: seeded binary encoding (random projection or ID/Level),
classwise K-means initialization of a fully-utilized multi-centroid
associative memory, quantization-aware iterative learning against the
memory's 1-bit shadow, and packed popcount associative search. The cost
model accounts cycles, array usage, utilization, relative energy and
memory footprints for basic, partitioned and multi-centroid mappings.
"""

__version__ = "0.1.0"

from .core import (
    BinaryAM,
    BitHypervector,
    ClassMap,
    FloatAM,
    argmax_tiebreak,
    batch_similarity,
    dot_similarity,
)
from .data import LabeledDataset, load_idx, load_isolet, shuffle_split
from .encoding import (
    EncodedDataset,
    IdLevelTables,
    ProjectionMatrix,
    encode_dataset,
    encode_id_level,
    encode_project,
    generate_id_level,
    generate_projection,
)
from .imc_cost import (
    ArrayConfig,
    CostReport,
    MappingPlan,
    MatrixShape,
    compare_mappings,
    energy_comparison,
    memory_report,
    plan_cost,
    tile_cycles,
)
from .inference import ConfusionMatrix, EvalResult, evaluate, predict
from .init import (
    InitConfig,
    allocate_clusters,
    classwise_cluster,
    initial_clusters_per_class,
    initialize_am,
    kmeans_dot,
    random_sampling_init,
)
from .io_bin import ModelFile, load_model, save_model
from .training import (
    TrainConfig,
    TrainReport,
    apply_update,
    fit,
    iterative_train_basic,
    normalize_am,
    quantize_am,
    select_update_targets,
    single_pass_train,
    train_epoch,
)

__all__ = [
    "__version__",
    "ArrayConfig",
    "BinaryAM",
    "BitHypervector",
    "ClassMap",
    "ConfusionMatrix",
    "CostReport",
    "EncodedDataset",
    "EvalResult",
    "FloatAM",
    "IdLevelTables",
    "InitConfig",
    "LabeledDataset",
    "MappingPlan",
    "MatrixShape",
    "ModelFile",
    "ProjectionMatrix",
    "TrainConfig",
    "TrainReport",
    "allocate_clusters",
    "apply_update",
    "argmax_tiebreak",
    "batch_similarity",
    "classwise_cluster",
    "compare_mappings",
    "dot_similarity",
    "encode_dataset",
    "encode_id_level",
    "encode_project",
    "energy_comparison",
    "evaluate",
    "fit",
    "generate_id_level",
    "generate_projection",
    "initial_clusters_per_class",
    "initialize_am",
    "iterative_train_basic",
    "kmeans_dot",
    "load_idx",
    "load_isolet",
    "load_model",
    "memory_report",
    "normalize_am",
    "plan_cost",
    "predict",
    "quantize_am",
    "random_sampling_init",
    "save_model",
    "select_update_targets",
    "shuffle_split",
    "single_pass_train",
    "tile_cycles",
    "train_epoch",
]
