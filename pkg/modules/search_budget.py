# modules/search_budget.py

import logging
import threading

from modules.config_loader import get_settings
from modules.errors import BudgetExhausted

logger = logging.getLogger(__name__)


class SearchBudget:
    """
    Node counter shared by every search that runs on behalf of one request.

    Parameters:
    - limit (int | None): Maximum number of search nodes; None means unlimited.
    - label (str): Name used in log lines and refusal messages.
    """

    def __init__(self, limit=None, label="search"):
        self.limit = limit
        self.label = label
        self.nodes = 0
        self.refusals = 0
        self._lock = threading.Lock()

    @classmethod
    def unlimited(cls):
        return cls(None, "unlimited")

    def tick(self, n=1):
        with self._lock:
            self.nodes += n
            if self.limit is not None and self.nodes > self.limit:
                self.refusals += 1
                logger.warning("%s: budget of %d nodes exhausted", self.label, self.limit)
                raise BudgetExhausted(f"{self.label}: node budget {self.limit} exhausted", self.stats())

    def note_refusal(self):
        with self._lock:
            self.refusals += 1

    def stats(self):
        return {"nodes": self.nodes, "refusals": self.refusals, "limit": self.limit}

    def remaining(self):
        if self.limit is None:
            return None
        return max(self.limit - self.nodes, 0)


def ensure_budget(budget):
    """Return `budget`, or a fresh one built from the settings when it is None."""
    if budget is not None:
        return budget
    return SearchBudget(get_settings().budget, "default")
