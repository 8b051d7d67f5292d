"""Constitutive-model bridge: UMAT-style materials evaluated for a host-style FE code."""

from ._core import (
    ContractViolation,
    Error,
    HostResponse,
    InvalidConfiguration,
    Material,
    MaterialError,
    ParseError,
    PluginError,
    SingularMatrix,
    dS_dF,
    default_tolerance,
    hydrogen_demo,
    load_plugin,
    material,
    material_names,
    norm_abaqus_style,
    norm_comsol_style,
    oriani_trapped,
    polar_decompose,
    run_case,
    second_pk,
    strain_host_to_umat,
    strain_umat_to_host,
    stress_host_to_umat,
    stress_umat_to_host,
    tangent_check,
    tangent_host_to_umat,
    tangent_umat_to_host,
    trap_density,
)

__all__ = [name for name in dir() if not name.startswith("_")]
