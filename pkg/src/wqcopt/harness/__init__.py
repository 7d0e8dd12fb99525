from .runner import RunSpec, compare, estimate, run
from .traceio import BoundReport, read_trace, write_trace

__all__ = ["BoundReport", "RunSpec", "compare", "estimate", "read_trace", "run", "write_trace"]
