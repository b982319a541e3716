"""On-farm decision-support engine: a supervisor that routes herd questions
to literature, web, SQL, document-store, and lactation-model subagents
served by one small local language model."""

__version__ = "0.1.0"

from .config import SystemConfig
from .domain import AgentAnswer, ConversationTurn, RouteLabel, UserQuery
from .service import Orchestrator, TurnResult

__all__ = [
    "AgentAnswer",
    "ConversationTurn",
    "Orchestrator",
    "RouteLabel",
    "SystemConfig",
    "TurnResult",
    "UserQuery",
    "__version__",
]
