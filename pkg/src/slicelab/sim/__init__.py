"""Virtual-clock traffic simulation for the session hub."""

from .simulate import SimReport, SimRow, run_scaling, simulate_traffic

__all__ = ["SimReport", "SimRow", "run_scaling", "simulate_traffic"]
