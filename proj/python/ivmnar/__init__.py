"""CACE identification for a binary instrument with missing treatment and/or outcome.

Observables, configs and results are plain dicts in the same JSON layout the CLI uses.
"""

import json

from . import _ivmnar
from ._ivmnar import IvmnarError, normalize_label

__all__ = [
    "IvmnarError",
    "catalog",
    "check_conditions",
    "empirical_observable",
    "fixtures",
    "identify",
    "normalize_label",
    "recover_joint",
    "sample_csv",
    "sensitivity",
    "simulate",
    "verify_counterexamples",
]


def _dump(x):
    return x if isinstance(x, str) else json.dumps(x)


def identify(mechanism, observable, exact=False, tol_det=1e-10, tol_prob=1e-12):
    return json.loads(_ivmnar.identify(mechanism, _dump(observable), exact, tol_det, tol_prob))


def check_conditions(mechanism, observable, exact=False, tol_det=1e-10, tol_prob=1e-12):
    return json.loads(_ivmnar.check_conditions(mechanism, _dump(observable), exact, tol_det, tol_prob))


def recover_joint(mechanism, observable):
    return json.loads(_ivmnar.recover_joint(mechanism, _dump(observable)))


def simulate(config, exact=True):
    """Exact observable table (plus mechanism and trueCace) for a params config."""
    return json.loads(_ivmnar.simulate(_dump(config), exact))


def sample_csv(config, n, seed):
    return _ivmnar.sample_csv(_dump(config), n, seed)


def empirical_observable(csv, one_sided=False, smooth=False, tol_prob=1e-12):
    return json.loads(_ivmnar.empirical_observable(csv, one_sided, smooth, tol_prob))


def sensitivity(mechanisms, csv=None, observable=None, one_sided=False, smooth=False, tol_det=1e-10, tol_prob=1e-12):
    """Identify under each mechanism; pass exactly one of csv (text) or observable."""
    if (csv is None) == (observable is None):
        raise ValueError("give exactly one of csv / observable")
    mechanisms = list(mechanisms)
    if csv is not None:
        return json.loads(_ivmnar.sensitivity_csv(csv, mechanisms, one_sided, smooth, tol_det, tol_prob))
    return json.loads(_ivmnar.sensitivity_observable(_dump(observable), mechanisms, tol_det, tol_prob))


def verify_counterexamples():
    return json.loads(_ivmnar.verify_counterexamples())


def fixtures():
    return json.loads(_ivmnar.fixtures())


def catalog():
    return json.loads(_ivmnar.catalog())
