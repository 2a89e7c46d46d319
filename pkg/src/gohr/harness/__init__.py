from .runlog import RunLog

__all__ = ["RunLog"]
