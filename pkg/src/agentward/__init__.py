"""Runtime enforcement for multi-agent workflows.

Every functional step in a workflow runs only after a paired enforcement
check authorizes it. The package bundles the execution graph and runner, a
hybrid rule/judge decision engine, intervention resources, a static package
scanner, a code-execution gate, a test-driven enforcer factory, an evaluation
harness, and a loopback control service.
"""

__version__ = "0.1.0"

from .verdicts import Decision, Severity, Verdict

__all__ = ["Decision", "Severity", "Verdict", "__version__"]
