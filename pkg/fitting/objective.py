"""Regularised least-squares objective and its closed-form coordinate step."""
import numpy as np

from .rig import RigKind

DEGENERATE_NORM = 1e-12


def project_unit_interval(x):
    """Clip a scalar onto [0, 1]."""
    if x < 0.0:
        return 0.0
    if x > 1.0:
        return 1.0
    return float(x)


def coordinate_step(phi, psi, alpha, current, eps=DEGENERATE_NORM):
    """Minimise 1/2 ||w phi + psi||^2 + alpha w over w in [0, 1].

    The stationary point is (-phi.psi - alpha) / ||phi||^2; the subproblem is a
    convex parabola so its box minimiser is the projected stationary point.
    Returns ``(value, degenerate)``. A coordinate with ||phi||^2 < eps is
    degenerate: the subproblem reduces to alpha w, so it is zeroed when
    alpha > 0 and left untouched otherwise.
    """
    norm2 = float(phi @ phi)
    if norm2 < eps:
        return (0.0 if alpha > 0 else float(current)), True
    return project_unit_interval((-float(phi @ psi) - alpha) / norm2), False


def step_change(phi, residual, alpha, old, new):
    """Objective change when one coordinate moves from old to new.

    The rig is affine in a single weight, so the new residual is
    residual + (new - old) phi and the change has a closed form.
    """
    delta = new - old
    return delta * float(phi @ residual) + 0.5 * delta * delta * float(phi @ phi) + alpha * delta


def objective_from_residual(residual, w, alpha):
    return 0.5 * float(residual @ residual) + alpha * float(np.sum(w))


def objective_value(rig, w, target, alpha, kind=RigKind.QUARTIC):
    """1/2 ||f(w) - target||^2 + alpha * sum(w) with the selected rig function."""
    w = rig.check_weights(w)
    target = rig.check_mesh(target)
    residual = rig.neutral.coords + rig.deformation(w, kind) - target.coords
    return objective_from_residual(residual, w, alpha)
