"""JSON wire formats for channels and collision specs.

Complex scalars are serialized as ``[re, im]`` pairs, so a 2x2 complex
matrix is a 2x2x2 nested list. A channel is either

    {"transfer": [[...4x4 real...]]}

or

    {"decoherence": {"lambda": x, "phi": y, "basis": <2x2 complex, optional>}}

and a collision spec is

    {"V0": <2x2 complex>, "V1": <2x2 complex>, "xi": <2x2 complex>,
     "basis": <2x2 complex, optional>}
"""

from __future__ import annotations

import numpy as np

from .channels import DecoherenceBasis, DecoherenceParams, make_decoherence_channel
from .collisions import CollisionSpec


class SchemaError(ValueError):
    """Input JSON does not match the documented schema."""


def complex_matrix_to_json(m: np.ndarray) -> list:
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def complex_matrix_from_json(data, shape: tuple[int, int], name: str) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.shape != shape + (2,):
        raise SchemaError(
            f"{name} must be a {shape[0]}x{shape[1]} array of [re, im] pairs, "
            f"got shape {arr.shape}"
        )
    return arr[..., 0] + 1j * arr[..., 1]


def real_matrix_from_json(data, shape: tuple[int, int], name: str) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.shape != shape:
        raise SchemaError(f"{name} must be a {shape[0]}x{shape[1]} real array, got {arr.shape}")
    return arr


def _require_dict(data, name: str) -> dict:
    if not isinstance(data, dict):
        raise SchemaError(f"{name} must be a JSON object, got {type(data).__name__}")
    return data


def _no_extras(data: dict, allowed: set[str], name: str) -> None:
    extras = set(data) - allowed
    if extras:
        raise SchemaError(f"unknown keys {sorted(extras)} in {name}")


def basis_from_json(data, name: str = "basis") -> DecoherenceBasis:
    if data is None:
        return DecoherenceBasis.computational()
    return DecoherenceBasis(complex_matrix_from_json(data, (2, 2), name))


def channel_from_json(data) -> tuple[np.ndarray, DecoherenceBasis]:
    """Parse a channel object into (transfer matrix, basis)."""
    data = _require_dict(data, "channel")
    _no_extras(data, {"transfer", "decoherence"}, "channel")
    if ("transfer" in data) == ("decoherence" in data):
        raise SchemaError("channel needs exactly one of 'transfer' or 'decoherence'")
    if "transfer" in data:
        return real_matrix_from_json(data["transfer"], (4, 4), "transfer"), \
            DecoherenceBasis.computational()
    dec = _require_dict(data["decoherence"], "decoherence")
    _no_extras(dec, {"lambda", "phi", "basis"}, "decoherence")
    try:
        lam = float(dec["lambda"])
        phi = float(dec.get("phi", 0.0))
    except KeyError as exc:
        raise SchemaError(f"decoherence object missing key {exc}") from None
    except (TypeError, ValueError):
        raise SchemaError("'lambda' and 'phi' must be numbers") from None
    basis = basis_from_json(dec.get("basis"))
    return make_decoherence_channel(DecoherenceParams(lam, phi)), basis


def params_from_json(data) -> DecoherenceParams:
    data = _require_dict(data, "parameters")
    _no_extras(data, {"lambda", "phi"}, "parameters")
    if "lambda" not in data:
        raise SchemaError("parameters object missing key 'lambda'")
    try:
        lam = float(data["lambda"])
        phi = float(data.get("phi", 0.0))
    except (TypeError, ValueError):
        raise SchemaError("'lambda' and 'phi' must be numbers") from None
    return DecoherenceParams(lam, phi)


def collision_spec_to_json(spec: CollisionSpec) -> dict:
    return {
        "V0": complex_matrix_to_json(spec.v0),
        "V1": complex_matrix_to_json(spec.v1),
        "xi": complex_matrix_to_json(spec.xi),
        "basis": complex_matrix_to_json(spec.basis.w),
    }


def collision_spec_from_json(data) -> CollisionSpec:
    data = _require_dict(data, "collision spec")
    _no_extras(data, {"V0", "V1", "xi", "basis"}, "collision spec")
    missing = {"V0", "V1", "xi"} - set(data)
    if missing:
        raise SchemaError(f"collision spec missing keys {sorted(missing)}")
    return CollisionSpec(
        v0=complex_matrix_from_json(data["V0"], (2, 2), "V0"),
        v1=complex_matrix_from_json(data["V1"], (2, 2), "V1"),
        xi=complex_matrix_from_json(data["xi"], (2, 2), "xi"),
        basis=basis_from_json(data.get("basis")),
    )


def density_from_json(data, name: str = "rho") -> np.ndarray:
    return complex_matrix_from_json(data, (2, 2), name)
