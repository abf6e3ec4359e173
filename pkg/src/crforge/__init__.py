"""crforge: agentic RAG pipeline for cyber-range description files.

Subpackages:
    kb       per-framework knowledge bases with MMR retrieval
    cr       description-file model, parser, validator, semantic diff
    agent    session engine with bounded self-correction loop
    deploy   command planning and pluggable transports
    service  HTTP API exposing the checker, deployments, and sessions
"""

__version__ = "0.1.0"
