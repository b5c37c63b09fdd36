from enhancer.serializer.config_serializer import (
    TrainConfigSerializer,
    config_from_mapping,
    dump_config,
    flatten_errors,
    load_config,
)
from enhancer.serializer.manifest_serializer import (
    EvaluationRecordSerializer,
    RunManifestSerializer,
    write_manifest,
)
