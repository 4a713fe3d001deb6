"""Configuration, seeded sweeps, CSV/JSON/SVG output and the command line."""
from .config import RunConfig, load_config, parse_config
from .sweep import RunRecord, records_from_csv, records_to_csv, run_sweep
from .svg import emit_figure

__all__ = ["RunConfig", "load_config", "parse_config", "RunRecord", "records_from_csv",
           "records_to_csv", "run_sweep", "emit_figure"]
