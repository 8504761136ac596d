"""Consistency checks between the Sobolev index and the jump-activity indices."""
import logging

logger = logging.getLogger(__name__)

INDEX_SLACK = 0.05
FULL_INDEX = 2.0 - 1e-3


def _beta_above_gamma(beta, gamma) -> dict:
    margin = beta - gamma
    return {"passed": margin >= -INDEX_SLACK, "margin": margin, "slack": INDEX_SLACK}


def _beta_above_index(beta, index) -> dict:
    if index >= FULL_INDEX:
        return {"passed": True, "skipped": True, "margin": None, "slack": INDEX_SLACK}
    margin = beta - index
    return {"passed": margin >= -INDEX_SLACK, "skipped": False, "margin": margin, "slack": INDEX_SLACK}


def cross_check(report) -> dict:
    """
    Verdicts for beta >= gamma and, below the Brownian index 2, beta >= sobolev index.

    Each verdict carries the signed margin and the slack it was judged with.
    """
    missing = [name for name in ("beta", "gamma", "sobolev_index") if getattr(report, name) is None]
    if missing:
        raise MissingField(f"cross_check: report has no {', '.join(missing)}")
    verdicts = {
        "beta_ge_gamma": _beta_above_gamma(report.beta, report.gamma),
        "beta_ge_index": _beta_above_index(report.beta, report.sobolev_index),
    }
    for name, verdict in verdicts.items():
        if not verdict["passed"]:
            logger.warning("cross_check %s failed with margin %s", name, verdict["margin"])
    return verdicts


def index_verdicts(report) -> dict:
    """The verdicts computable from whatever fields the report carries."""
    verdicts = {}
    if report.beta is not None and report.gamma is not None:
        verdicts["beta_ge_gamma"] = _beta_above_gamma(report.beta, report.gamma)
    if report.beta is not None and report.sobolev_index is not None:
        verdicts["beta_ge_index"] = _beta_above_index(report.beta, report.sobolev_index)
    return verdicts


# Custom exceptions
class MissingField(Exception):
    pass
