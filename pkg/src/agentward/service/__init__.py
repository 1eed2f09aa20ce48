"""Operator control surface: workflow supervision and its HTTP API."""

from .api import API_VERSION, MAX_POLL_WAIT, ControlApiServer
from .supervisor import (
    SCOPE_ALL,
    TICKET_APPROVED,
    TICKET_DENIED,
    TICKET_EXPIRED,
    TICKET_PENDING,
    TICKET_STATES,
    WORKFLOW_FAILED,
    WORKFLOW_RUNNING,
    ReviewTicket,
    Supervisor,
    WorkflowHandle,
)

__all__ = [
    "API_VERSION",
    "MAX_POLL_WAIT",
    "ControlApiServer",
    "SCOPE_ALL",
    "TICKET_APPROVED",
    "TICKET_DENIED",
    "TICKET_EXPIRED",
    "TICKET_PENDING",
    "TICKET_STATES",
    "WORKFLOW_FAILED",
    "WORKFLOW_RUNNING",
    "ReviewTicket",
    "Supervisor",
    "WorkflowHandle",
]
