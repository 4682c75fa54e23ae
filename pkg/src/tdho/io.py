"""Deterministic CSV and JSON writers.

Identical inputs must produce byte-identical files: field order is fixed,
CSV numbers carry 17 significant digits (round-trip exact for doubles),
JSON uses UTF-8 with stable key order and LF line endings.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .mode_solver import ModeTrajectory, polar_decompose, wronskian
from .states import WaveFunctionGrid


def fmt(value: float) -> str:
    """17-significant-digit decimal form of one float."""
    return f"{float(value):.17g}"


def write_trajectory_csv(traj: ModeTrajectory, path, indices=None) -> None:
    """Columns: t, Re u, Im u, Re u', Im u', |W - i|, rho, Theta.

    ``indices`` selects the rows to write (default: all samples); the phase
    unwrap always runs over the full trajectory so row selection cannot
    change branch continuity.
    """
    rho, theta = polar_decompose(traj)
    drift = np.abs(wronskian(traj) - 1j)
    if indices is None:
        indices = range(len(traj))
    lines = ["t,re_u,im_u,re_u_dot,im_u_dot,abs_wronskian_minus_i,rho,theta"]
    for i in indices:
        lines.append(
            ",".join(
                fmt(v)
                for v in (
                    traj.t[i],
                    traj.u[i].real,
                    traj.u[i].imag,
                    traj.u_dot[i].real,
                    traj.u_dot[i].imag,
                    drift[i],
                    rho[i],
                    theta[i],
                )
            )
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def write_wavefunction_csv(grid: WaveFunctionGrid, path) -> None:
    """Columns: x, Re psi, Im psi, |psi|^2, with state parameters in the
    comment header (t, n, alpha, r, phi, hbar, profile hash)."""
    meta = grid.meta
    alpha = complex(meta.get("alpha", 0j))
    header = [
        f"# t={fmt(grid.t)}",
        f"# n={int(meta.get('n', 0))}",
        f"# alpha={fmt(alpha.real)}{'+' if alpha.imag >= 0 else '-'}{fmt(abs(alpha.imag))}j",
        f"# r={fmt(meta.get('r', 0.0))}",
        f"# phi={fmt(meta.get('phi', 0.0))}",
        f"# hbar={fmt(meta.get('hbar', 1.0))}",
        f"# profile_hash={meta.get('profile_hash', 'none')}",
        "x,re_psi,im_psi,abs2_psi",
    ]
    lines = header + [
        ",".join(
            fmt(v)
            for v in (grid.x[i], grid.psi[i].real, grid.psi[i].imag, abs(grid.psi[i]) ** 2)
        )
        for i in range(grid.x.size)
    ]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return obj


def write_json(obj, path) -> None:
    """UTF-8 JSON with stable (insertion) key order and a trailing newline."""
    text = json.dumps(_jsonable(obj), indent=2, ensure_ascii=False)
    Path(path).write_text(text + "\n", encoding="utf-8", newline="\n")
