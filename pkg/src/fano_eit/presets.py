"""Figure presets, default probe grids and the key-value parameter file."""

from pathlib import Path

import numpy as np

from .params import AtomicSystem, FieldConfig, ParameterError, window_center
from .susceptibility import default_window_halfwidth
from .units import convert_density, density_to_cm3

PRESETS = ("fig1", "fig2", "fig3", "fig4", "fig5")

_FIGURE_FIELDS = {
    # (q, eps2)
    "fig1": (10.0, 0.0),
    "fig2": (10.0, 1e-6),
    "fig3": (10.0, 1e-7),
    "fig4": (10.0, 1e-8),
    "fig5": (100.0, 1e-9),
}

BASE = dict(e_b=-0.2, e_c=-0.1, e_a=0.1, gamma=1e-9, b_b=2.0, b_c=3.0, gamma_cb=0.0)
DENSITY_CM3 = 0.67e12
DEFAULT_POINTS = 4001

PARAM_KEYS = (
    "e_b_au", "e_c_au", "e_a_au", "gamma_au", "q", "b_b_au", "b_c_au",
    "gamma_cb_au", "density_cm3", "eps2_au", "omega2_au",
    "grid_center_au", "grid_halfwidth_au", "grid_points",
)
_GRID_KEYS = ("grid_center_au", "grid_halfwidth_au", "grid_points")


def aligned_omega2(system):
    """Control frequency placing the two-photon resonance on the autoionizing state."""
    return system.e_a - system.e_c


def default_grid(system, eps2, omega2, points=DEFAULT_POINTS):
    """Nested linear spans: +-50 gamma and +-gamma about the resonance, plus a
    span of five estimated window half-widths about the two-photon center
    (+-1e-4 gamma when the control field is off)."""
    g = system.gamma
    probe = FieldConfig(eps2=eps2, omega2=omega2, detunings=[0.0])
    center = window_center(system, probe)
    half = default_window_halfwidth(system, probe)
    inner = 5.0 * half if half > 0 else 1e-4 * g
    n = max(points // 3, 3)
    n_first = points - 2 * n
    spans = [
        np.linspace(-50 * g, 50 * g, n_first | 1),
        np.linspace(-g, g, n | 1),
        center + np.linspace(-inner, inner, n | 1),
    ]
    return np.unique(np.concatenate(spans))


def paper_preset(figure_id, points=DEFAULT_POINTS):
    """(AtomicSystem, FieldConfig) for one of the five figure scenarios."""
    try:
        q, eps2 = _FIGURE_FIELDS[figure_id]
    except KeyError:
        raise ParameterError(f"unknown preset {figure_id!r}; choose from {', '.join(PRESETS)}")
    system = AtomicSystem(q=q, density_n=convert_density(DENSITY_CM3), **BASE)
    omega2 = aligned_omega2(system)
    grid = default_grid(system, eps2, omega2, points)
    return system, FieldConfig(eps2=eps2, omega2=omega2, detunings=grid)


def uniform_grid(center, halfwidth, points):
    if halfwidth <= 0 or points < 2:
        raise ParameterError("grid needs halfwidth > 0 and at least 2 points")
    return center + np.linspace(-halfwidth, halfwidth, int(points))


def read_params(path):
    """(AtomicSystem, FieldConfig) from a parameter file."""
    return params_from_mapping(read_param_mapping(path))


def read_param_mapping(path):
    """Parse a ``key = value`` parameter file. ``#`` starts a comment.

    Grid keys are optional; when absent the default nested grid is used.
    """
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" in line:
            key, _, val = line.partition("=")
        else:
            parts = line.split(None, 1)
            if len(parts) != 2:
                raise ParameterError(f"{path}:{lineno}: expected 'key = value'")
            key, val = parts
        key = key.strip()
        if key not in PARAM_KEYS:
            raise ParameterError(f"{path}:{lineno}: unknown key {key!r}")
        if key in values:
            raise ParameterError(f"{path}:{lineno}: duplicate key {key!r}")
        try:
            values[key] = float(val.strip())
        except ValueError:
            raise ParameterError(f"{path}:{lineno}: {key} is not a number: {val.strip()!r}")
    missing = [k for k in PARAM_KEYS if k not in values and k not in _GRID_KEYS]
    if missing:
        raise ParameterError(f"{path}: missing keys {', '.join(missing)}")
    return values


def params_from_mapping(values):
    system = AtomicSystem(
        e_b=values["e_b_au"], e_c=values["e_c_au"], e_a=values["e_a_au"],
        gamma=values["gamma_au"], q=values["q"], b_b=values["b_b_au"],
        b_c=values["b_c_au"], gamma_cb=values["gamma_cb_au"],
        density_n=convert_density(values["density_cm3"]),
    )
    eps2, omega2 = values["eps2_au"], values["omega2_au"]
    grid_given = [k for k in _GRID_KEYS if k in values]
    if grid_given and len(grid_given) != len(_GRID_KEYS):
        raise ParameterError("grid_center_au, grid_halfwidth_au and grid_points go together")
    if grid_given:
        points = values["grid_points"]
        if points != int(points):
            raise ParameterError("grid_points must be an integer")
        grid = uniform_grid(values["grid_center_au"], values["grid_halfwidth_au"], int(points))
    else:
        grid = default_grid(system, eps2, omega2)
    return system, FieldConfig(eps2=eps2, omega2=omega2, detunings=grid)


def params_to_mapping(system, field, grid=None):
    """Flat dict with the file keys. ``grid`` is (center, halfwidth, points) or None."""
    out = {
        "e_b_au": system.e_b, "e_c_au": system.e_c, "e_a_au": system.e_a,
        "gamma_au": system.gamma, "q": system.q, "b_b_au": system.b_b,
        "b_c_au": system.b_c, "gamma_cb_au": system.gamma_cb,
        "density_cm3": float(density_to_cm3(system.density_n)),
        "eps2_au": field.eps2, "omega2_au": field.omega2,
    }
    if grid is not None:
        center, halfwidth, points = grid
        out.update(grid_center_au=center, grid_halfwidth_au=halfwidth, grid_points=int(points))
    return out


def write_params(path, system, field, grid=None):
    lines = [f"{k} = {v!r}" for k, v in params_to_mapping(system, field, grid).items()]
    Path(path).write_text("\n".join(lines) + "\n")
