"""Piezomagnetic material constants, the [110] frame rotation and file I/O.

Material files are TOML documents with one table per material. Values are
written in the customary laboratory units and converted to SI on load:

    [terfenol-D]
    rho_g_cm3 = 9.06
    c11_gpa = 55
    c12_gpa = 43
    c44_gpa = 12
    q31_n_am = -45
    q33_n_am = 90
    mu11_un_a2 = 6.283
"""
from __future__ import annotations

import math
import os
import warnings
from dataclasses import dataclass, fields
from decimal import Decimal
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

ENV_MATERIALS = "PIEZOMAG_SAW_MATERIALS"
BUILTIN_NAME = "terfenol-D"

# file key -> (field, decimal exponent from file unit to SI)
FILE_KEYS = {
    "rho_g_cm3": ("rho", 3),
    "c11_gpa": ("c11", 9),
    "c12_gpa": ("c12", 9),
    "c44_gpa": ("c44", 9),
    "q31_n_am": ("q31", 0),
    "q33_n_am": ("q33", 0),
    "mu11_un_a2": ("mu11", -6),
}


class MaterialError(ValueError):
    """Raised for unparsable material files or physically invalid constants."""

    def __init__(self, message, field=None, line=None):
        super().__init__(message)
        self.field = field
        self.line = line


@dataclass(frozen=True)
class MaterialParams:
    name: str
    rho: float
    c11: float
    c12: float
    c44: float
    q31: float
    q33: float
    mu11: float

    def __post_init__(self):
        for f in fields(self)[1:]:
            value = getattr(self, f.name)
            if not math.isfinite(value):
                raise MaterialError(f"{self.name}: {f.name} is not finite", field=f.name)
        if self.rho <= 0:
            raise MaterialError(f"{self.name}: rho must be positive", field="rho")
        if self.mu11 <= 0:
            raise MaterialError(f"{self.name}: mu11 must be positive", field="mu11")
        if self.c44 <= 0:
            raise MaterialError(f"{self.name}: c44 must be positive", field="c44")
        if self.c11 - self.c12 <= 0:
            raise MaterialError(f"{self.name}: c11 - c12 must be positive", field="c12")
        if self.c11 + 2 * self.c12 <= 0:
            raise MaterialError(f"{self.name}: c11 + 2*c12 must be positive", field="c12")

    def replace(self, **changes) -> "MaterialParams":
        values = {f.name: getattr(self, f.name) for f in fields(self)}
        values.update(changes)
        return MaterialParams(**values)


@dataclass(frozen=True)
class RotatedConstants:
    """Constants seen by a wave travelling along [110] on a (001) surface."""

    c11_prime: float
    c11: float
    c12: float
    c44: float
    q31: float
    q33: float
    mu11: float
    rho: float


TERFENOL_D = MaterialParams(
    name=BUILTIN_NAME,
    rho=9060.0,
    c11=55e9,
    c12=43e9,
    c44=12e9,
    q31=-45.0,
    q33=90.0,
    mu11=6.283e-6,
)


def rotate_to_110(m: MaterialParams) -> RotatedConstants:
    c11_prime = (m.c11 + m.c12 + 2.0 * m.c44) / 2.0
    return RotatedConstants(
        c11_prime=c11_prime,
        c11=m.c11,
        c12=m.c12,
        c44=m.c44,
        q31=m.q31,
        q33=m.q33,
        mu11=m.mu11,
        rho=m.rho,
    )


def bulk_velocities(m: MaterialParams) -> tuple[float, float]:
    """Shear and longitudinal bulk speeds along [110], in m/s."""
    rc = rotate_to_110(m)
    return math.sqrt(m.c44 / m.rho), math.sqrt(rc.c11_prime / m.rho)


def _line_of(text: str, name: str) -> int | None:
    for i, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if stripped in (f"[{name}]", f'["{name}"]', f"['{name}']"):
            return i
    return None


def parse_materials(text: str, source: str = "<string>") -> list[MaterialParams]:
    try:
        doc = tomllib.loads(text, parse_float=Decimal)
    except tomllib.TOMLDecodeError as exc:
        raise MaterialError(f"{source}: {exc}", line=getattr(exc, "lineno", None)) from exc

    out = []
    for name, table in doc.items():
        line = _line_of(text, name)
        where = f"{source}:{line}" if line else source
        if not isinstance(table, dict):
            raise MaterialError(f"{where}: '{name}' is not a table", line=line)
        missing = sorted(set(FILE_KEYS) - set(table))
        if missing:
            raise MaterialError(f"{where}: '{name}' is missing {', '.join(missing)}",
                                field=missing[0], line=line)
        unknown = sorted(set(table) - set(FILE_KEYS))
        if unknown:
            raise MaterialError(f"{where}: '{name}' has unknown key {unknown[0]}",
                                field=unknown[0], line=line)
        values = {}
        for key, (field_name, exponent) in FILE_KEYS.items():
            raw = table[key]
            if isinstance(raw, bool) or not isinstance(raw, (int, Decimal)):
                raise MaterialError(f"{where}: '{name}'.{key} must be a number",
                                    field=field_name, line=line)
            values[field_name] = float(Decimal(raw).scaleb(exponent))
        try:
            out.append(MaterialParams(name=name, **values))
        except MaterialError as exc:
            raise MaterialError(f"{where}: {exc}", field=exc.field, line=line) from None
    return out


def load_materials(path) -> list[MaterialParams]:
    """Read every material table in ``path``.

    The built-in terfenol-D record is always part of the result. A file entry
    that reuses the built-in name must carry identical values; it then
    shadows the built-in with a warning.
    """
    path = Path(path)
    loaded = parse_materials(path.read_text(encoding="utf-8"), source=str(path))
    return _merge([TERFENOL_D], loaded, str(path))


def _merge(base, extra, source):
    by_name = {m.name: m for m in base}
    for m in extra:
        previous = by_name.get(m.name)
        if previous is not None:
            if previous != m:
                raise MaterialError(f"{source}: '{m.name}' conflicts with an existing record")
            warnings.warn(f"{source}: '{m.name}' shadows an existing record", stacklevel=3)
        by_name[m.name] = m
    return list(by_name.values())


def format_materials(materials) -> str:
    """Serialize to the file format. Round-trips bit-exactly through load."""
    chunks = []
    for m in materials:
        lines = [f'["{m.name}"]']
        for key, (field_name, exponent) in FILE_KEYS.items():
            value = Decimal(repr(getattr(m, field_name))).scaleb(-exponent)
            lines.append(f"{key} = {_toml_number(value)}")
        chunks.append("\n".join(lines))
    return "\n\n".join(chunks) + "\n"


def _toml_number(value: Decimal) -> str:
    text = format(value.normalize(), "e")
    mantissa, exp = text.split("e")
    if "." not in mantissa:
        mantissa += ".0"
    return f"{mantissa}e{int(exp)}"


def save_materials(materials, path) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(format_materials(materials), encoding="utf-8")
    os.replace(tmp, path)


def material_catalog(extra_files=()) -> dict[str, MaterialParams]:
    """Built-in records plus files from the environment and ``extra_files``."""
    records = [TERFENOL_D]
    env = os.environ.get(ENV_MATERIALS)
    paths = [p for p in env.split(os.pathsep) if p] if env else []
    paths.extend(str(p) for p in extra_files)
    for p in paths:
        extra = parse_materials(Path(p).read_text(encoding="utf-8"), source=p)
        records = _merge(records, extra, p)
    return {m.name: m for m in records}


def get_material(name: str, extra_files=()) -> MaterialParams:
    catalog = material_catalog(extra_files)
    try:
        return catalog[name]
    except KeyError:
        known = ", ".join(sorted(catalog))
        raise KeyError(f"unknown material '{name}' (known: {known})") from None
