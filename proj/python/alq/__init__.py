"""Adaptive LQ self-tuning regulator (C++ core via pybind11)."""

from ._alq import (
    AlqError,
    adjugate,
    augment,
    build_hamiltonian,
    det,
    eigenvalues,
    mat_exp_oracle,
    mat_exp_taylor,
    norms,
    normalize_config,
    presets,
    reproduce_spectra,
    reproduce_table1,
    run_config,
    run_preset,
    solve_lq_analytical,
    taylor_remainder_bound,
)

__all__ = [
    "AlqError",
    "adjugate",
    "augment",
    "build_hamiltonian",
    "det",
    "eigenvalues",
    "mat_exp_oracle",
    "mat_exp_taylor",
    "norms",
    "normalize_config",
    "presets",
    "reproduce_spectra",
    "reproduce_table1",
    "run_config",
    "run_preset",
    "solve_lq_analytical",
    "taylor_remainder_bound",
]
