"""Low-cost plasma diagnostics toolkit.

Modules:
    probe        compensated RC-ladder high-voltage probe analysis/design
    calibration  log-cubic illuminance calibration (fit, eval, invert)
    acquisition  raw ADC frames to volts/amps/watts/lux
    dataset      run persistence and power-vs-illuminance characterization
    svgchart     dependency-free SVG chart emission
    cli          command-line interface
"""

from .acquisition import (
    AdcFrame,
    ChannelConfig,
    PowerSample,
    counts_to_volts,
    detect_ignition,
    instantaneous_power,
    needle_voltage,
    offset_sum,
    process_frame,
    replay_stream,
    shunt_current,
)
from .calibration import (
    CalibrationCurve,
    CalibrationSample,
    InputKind,
    eval_log_poly,
    fit_log_cubic,
    fit_residuals,
    input_from_lux,
    is_monotone,
    lux_from_input,
    monotone_direction,
)
from .dataset import (
    Characterization,
    ExperimentMeta,
    ExperimentRun,
    characterize,
    load_characterization,
    load_run,
    save_characterization,
    summary_stats,
)
from .errors import (
    BracketError,
    DomainError,
    FitError,
    PlasmaKitError,
    PreconditionError,
    RowError,
    SchemaError,
    SingularityError,
)
from .probe import (
    ComplexResponse,
    ProbeNetwork,
    RCStage,
    RationalTransferFunction,
    bode_sweep,
    compensation_capacitor,
    dc_attenuation,
    design_probe,
    frequency_response,
    is_compensated,
    stage_impedance,
    transfer_function,
)

__version__ = "0.1.0"
