"""camrng: quantum random numbers from camera shot noise.

Pipeline: simulate (or ingest) sensor frames -> characterize the sensor
(gain, Fano factor, pixel health) -> bound the per-sample quantum
entropy -> compress raw codes through a seeded binary-matrix extractor
-> verify with a native statistical battery or export for external
ones.  The `camrng` command drives the same pipeline from the shell.
"""

from .bitstream import BitString
from .characterize import (
    FanoPoint,
    PhotonTransferCurve,
    PixelMask,
    PixelStats,
    build_pixel_mask,
    estimate_zeta,
    fano_curve_to_csv,
    fano_factor,
    find_operating_region,
    pixel_stats,
)
from .entropy import (
    EntropyReport,
    ExtractorPlan,
    entropy_report,
    epsilon_bound,
    plan_extractor,
    poisson_entropy_asymptotic,
    poisson_entropy_exact,
)
from .extractor import (
    BinaryMatrix,
    ExtractedStream,
    RawBitStream,
    ThroughputReport,
    concat_streams,
    extract,
    extract_throughput_bench,
    frame_to_bits,
    generate_matrix,
    load_matrix,
    save_matrix,
)
from .ingest import (
    FrameFileHeader,
    read_pgm,
    read_raw,
    read_sidecar,
    sidecar_path,
    write_pgm,
    write_raw,
    write_sidecar,
)
from .sensor import (
    Frame,
    PixelSignalModel,
    PRESETS,
    SensorConfig,
    absorbed_mean,
    digitize_electrons,
    get_preset,
    load_sensor_config,
    save_sensor_config,
    simulate_frame,
    simulate_pixel,
    simulate_stack,
    sweep_intensities,
    worker_count,
)
from .stattests import (
    SerialCorrelationResult,
    TestOutcome,
    TestReport,
    block_frequency_test,
    export_stream,
    monobit_test,
    run_battery,
    runs_test,
    serial_correlation,
    shannon_byte_entropy,
)

__version__ = "0.1.0"

__all__ = [
    "BinaryMatrix",
    "BitString",
    "EntropyReport",
    "ExtractedStream",
    "ExtractorPlan",
    "FanoPoint",
    "Frame",
    "FrameFileHeader",
    "PRESETS",
    "PhotonTransferCurve",
    "PixelMask",
    "PixelSignalModel",
    "PixelStats",
    "RawBitStream",
    "SensorConfig",
    "SerialCorrelationResult",
    "TestOutcome",
    "TestReport",
    "ThroughputReport",
    "absorbed_mean",
    "block_frequency_test",
    "build_pixel_mask",
    "concat_streams",
    "digitize_electrons",
    "entropy_report",
    "epsilon_bound",
    "estimate_zeta",
    "export_stream",
    "extract",
    "extract_throughput_bench",
    "fano_curve_to_csv",
    "fano_factor",
    "find_operating_region",
    "frame_to_bits",
    "generate_matrix",
    "get_preset",
    "load_matrix",
    "load_sensor_config",
    "monobit_test",
    "pixel_stats",
    "plan_extractor",
    "poisson_entropy_asymptotic",
    "poisson_entropy_exact",
    "read_pgm",
    "read_raw",
    "read_sidecar",
    "run_battery",
    "runs_test",
    "save_matrix",
    "save_sensor_config",
    "serial_correlation",
    "shannon_byte_entropy",
    "sidecar_path",
    "simulate_frame",
    "simulate_pixel",
    "simulate_stack",
    "sweep_intensities",
    "worker_count",
    "write_pgm",
    "write_raw",
    "write_sidecar",
]
