"""Reduction schedules under the linear latency/bandwidth/compute cost model."""

__version__ = "0.1.0"
