from .broadcast import EventBroadcaster, Subscription
from .live import LiveCell
from .service import create_app

__all__ = ["EventBroadcaster", "Subscription", "LiveCell", "create_app"]
