"""Coefficient-level editing: attribute remapping and interpolation."""

from __future__ import annotations

import math
from typing import Iterable

import torch

from .types import ATTRIBUTE_FIELDS, FaceCoefficients


def _validate_attributes(attributes: Iterable[str]) -> set[str]:
    attrs = set(attributes)
    unknown = attrs - set(ATTRIBUTE_FIELDS)
    if unknown:
        raise ValueError(
            f"unknown attributes {sorted(unknown)}; valid: {sorted(ATTRIBUTE_FIELDS)}"
        )
    return attrs


def _check_compatible(a: FaceCoefficients, b: FaceCoefficients):
    for name, field in ATTRIBUTE_FIELDS.items():
        va, vb = getattr(a, field), getattr(b, field)
        if va.shape != vb.shape:
            raise ValueError(
                f"{name} ({field}) dimensions differ: {va.numel()} vs {vb.numel()}"
            )


def remap_coefficients(
    source: FaceCoefficients,
    target: FaceCoefficients,
    attributes: Iterable[str],
) -> FaceCoefficients:
    """Take the listed attributes from source, everything else from target."""
    attrs = _validate_attributes(attributes)
    _check_compatible(source, target)
    fields = {}
    for name, field in ATTRIBUTE_FIELDS.items():
        origin = source if name in attrs else target
        fields[field] = getattr(origin, field).clone()
    return FaceCoefficients(**fields)


def wrap_angle(d: torch.Tensor) -> torch.Tensor:
    """Wrap angle differences into (-pi, pi]."""
    two_pi = 2.0 * math.pi
    return d - two_pi * torch.ceil((d - math.pi) / two_pi)


def interpolate_coefficients(
    a: FaceCoefficients,
    b: FaceCoefficients,
    t: float,
    attributes: Iterable[str],
) -> FaceCoefficients:
    """Linear interpolation of the listed attributes from a toward b.

    Rotation angles interpolate along the shortest wrapped path; unlisted
    attributes are copied from a. Endpoints are returned exactly.
    """
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t must be in [0, 1], got {t}")
    attrs = _validate_attributes(attributes)
    _check_compatible(a, b)
    if t == 0.0:
        return a.clone()
    fields = {}
    for name, field in ATTRIBUTE_FIELDS.items():
        va, vb = getattr(a, field), getattr(b, field)
        if name not in attrs:
            fields[field] = va.clone()
        elif t == 1.0:
            fields[field] = vb.clone()
        elif name == "pose":
            angles = va[:3] + t * wrap_angle(vb[:3] - va[:3])
            trans = (1.0 - t) * va[3:] + t * vb[3:]
            fields[field] = torch.cat([angles, trans])
        else:
            fields[field] = (1.0 - t) * va + t * vb
    return FaceCoefficients(**fields)
