from .clock import Scheduler
from .episode import EpisodeResult, PickRecord, run_episode, run_many

__all__ = ["Scheduler", "EpisodeResult", "PickRecord", "run_episode", "run_many"]
