"""Equilibrium limit-order-book toolkit.

Closed-form book shapes and spread equations for markets where informed
market makers race informed traders after efficient-price jumps, an
event-driven Monte Carlo simulator validating the zero-profit conditions,
a market-by-order log parser/replayer and trade-signature analytics.
"""

from .laws import (
    Exponential,
    JumpLaw,
    LaplaceVolume,
    NormalVolume,
    Pareto,
    PointMass,
    VolumeLaw,
    jump_law_from_config,
    law_to_config,
    volume_law_from_config,
)
from .equilibrium import (
    UNBOUNDED,
    BookShape,
    JumpSource,
    ModelParams,
    MultiSourceParams,
    SolverError,
    SpreadSolution,
    UnfillableLevelError,
    ZeroSpreadRegime,
    book_curves,
    gain_imm,
    gain_imm_multi,
    gain_nmm,
    shape_continuous,
    shape_multi,
    shape_tick,
    shape_toxic,
    spread_continuous,
    spread_tick,
    spread_toxic,
    theta_bar,
)
from .simulator import (
    LevelPnl,
    PricePath,
    SimConfig,
    SimEvent,
    SimResult,
    export_mbo,
    run,
    simulate_price_path,
)
from .mbo import MboEvent, OrderLifecycle, Replay, parse, reconstruct, write_csv
from .signature import (
    ClusterSpec,
    QuoteSeries,
    SignatureCurve,
    TradeRecord,
    build_trade_records,
    classify,
    micro_price,
    mid_price,
    signature_curves,
    trade_signature,
)

__version__ = "0.1.0"
