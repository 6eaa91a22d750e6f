"""Strip-based mesh tokenizer: compact token sequences for tri/quad meshes."""

from .mesh_io import (
    FilterResult,
    IslandPartition,
    Mesh,
    ObjParseError,
    corpus_filter,
    load_obj,
    single_island,
    uv_islands,
    write_obj,
)
from .quantize import (
    GridCoord,
    HierCode,
    IDENTITY_TRANSFORM,
    QuantizedMesh,
    Transform,
    decode_hier,
    dequantize,
    dequantize_mesh,
    encode_hier,
    normalize,
    quantize_mesh,
    to_grid,
)
from .strips import Strip, StripSet, extract_strips, key_order, seed_order, strip_faces
from .tokens import (
    TokenFileError,
    TokenHeader,
    TokenSequence,
    TokenStats,
    VOCAB,
    VocabLayout,
    baseline_serialize,
    compression_stats,
    read_tokens,
    serialize,
    write_tokens,
)
from .decode import (
    DecodeReport,
    VertexStream,
    decode,
    dual_decode_check,
    parse_tokens,
)
from .metrics import (
    MetricReport,
    SampleSet,
    chamfer_hausdorff,
    compare_meshes,
    f_score,
    normal_consistency,
    sample_surface,
)

__version__ = "0.1.0"
