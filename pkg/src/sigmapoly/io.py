"""Readers/writers for the JSON and CSV interchange formats.

All floats are serialized as shortest round-trip decimals (Python repr),
so identical inputs produce byte-identical artifacts.
"""

from __future__ import annotations

import json

from .core import FilippovSystem, PolyField, SwitchingFunction
from .errors import ConfigError, IOFailure
from .maps import Germ
from .poly2 import Poly2
from .polycycle import SyntheticLeg, SyntheticModel


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


# -- system JSON --------------------------------------------------------------


def poly_from_triples(triples) -> Poly2:
    try:
        return Poly2.from_triples([(int(i), int(j), float(c)) for i, j, c in triples])
    except (TypeError, ValueError) as e:
        raise ConfigError(f"bad coefficient triples: {e}") from e


def system_from_dict(d: dict) -> FilippovSystem:
    try:
        X = PolyField(
            poly_from_triples(d["X"]["fx"]), poly_from_triples(d["X"]["fy"])
        )
        Y = PolyField(
            poly_from_triples(d["Y"]["fx"]), poly_from_triples(d["Y"]["fy"])
        )
        if "domain" in d:
            h = SwitchingFunction(
                poly_from_triples(d["h"]), domain=tuple(float(v) for v in d["domain"])
            )
        else:
            h = SwitchingFunction(poly_from_triples(d["h"]))
    except KeyError as e:
        raise ConfigError(f"system file missing key {e}") from e
    return FilippovSystem(X=X, Y=Y, h=h)


def system_to_dict(Z: FilippovSystem) -> dict:
    d = {
        "X": {"fx": Z.X.fx.to_triples(), "fy": Z.X.fy.to_triples()},
        "Y": {"fx": Z.Y.fx.to_triples(), "fy": Z.Y.fy.to_triples()},
        "h": Z.h.h.to_triples(),
    }
    if Z.h.domain is not None:
        d["domain"] = list(Z.h.domain)
    return d


def read_system(path: str) -> FilippovSystem:
    try:
        with open(path) as f:
            d = json.load(f)
    except OSError as e:
        raise IOFailure(f"cannot read system file {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"system file {path} is not valid JSON: {e}") from e
    return system_from_dict(d)


# -- germ / model JSON --------------------------------------------------------


def read_germ(path: str) -> Germ:
    try:
        with open(path) as f:
            return Germ.from_dict(json.load(f))
    except OSError as e:
        raise IOFailure(f"cannot read germ file {path}: {e}") from e
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"bad germ file {path}: {e}") from e


def write_json(path: str, obj) -> None:
    try:
        with open(path, "w") as f:
            f.write(dumps(obj))
            f.write("\n")
    except OSError as e:
        raise IOFailure(f"cannot write {path}: {e}") from e


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(", ", ": "))


def model_to_dict(m: SyntheticModel) -> dict:
    return {
        "k": m.k,
        "legs": [
            {
                "Tu": leg.Tu.to_dict(),
                "DTs": leg.DTs.to_dict(),
                "sigma": [list(leg.sigma)],
                "a": leg.a,
            }
            for leg in m.legs
        ],
        "unfolding": dict(m.unfolding),
        "eII": m.eII,
    }


def model_from_dict(d: dict) -> SyntheticModel:
    try:
        legs = []
        for leg in d["legs"]:
            sigma = leg["sigma"]
            if len(sigma) != 1:
                raise ConfigError("exactly one sigma interval per leg is supported")
            legs.append(
                SyntheticLeg(
                    Tu=Germ.from_dict(leg["Tu"]),
                    DTs=Germ.from_dict(leg["DTs"]),
                    sigma=(float(sigma[0][0]), float(sigma[0][1])),
                    a=float(leg.get("a", 0.0)),
                )
            )
        return SyntheticModel(
            k=int(d["k"]),
            legs=tuple(legs),
            unfolding=dict(d.get("unfolding", {})),
            eII=bool(d.get("eII", False)),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"bad model JSON: {e}") from e


def read_model(path: str) -> SyntheticModel:
    try:
        with open(path) as f:
            return model_from_dict(json.load(f))
    except OSError as e:
        raise IOFailure(f"cannot read model file {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"model file {path} is not valid JSON: {e}") from e


# -- CSV ----------------------------------------------------------------------


def trajectory_csv(traj) -> str:
    """Trajectory CSV: t,x,y,regime,event with regime in {P,M,S}."""
    regime_code = {"Mplus": "P", "Mminus": "M", "Sliding": "S"}
    lines = ["t,x,y,regime,event"]
    for arc in traj.arcs:
        code = regime_code[arc.regime]
        for k, t in enumerate(arc.ts):
            x, y = arc.points[k]
            event = ""
            if k == len(arc.ts) - 1 and arc.exit_event:
                event = arc.exit_event
            lines.append(f"{_fmt(float(t))},{_fmt(float(x))},{_fmt(float(y))},{code},{event}")
    return "\n".join(lines) + "\n"


def diagram_csv(grid) -> str:
    lines = ["p1,p2,label,crossing_cycles,polycycles,sliding_cycles,flags"]
    for cell in grid.cells:
        p1, p2 = cell.params
        flags = ";".join(sorted(cell.flags))
        lines.append(
            f"{_fmt(p1)},{_fmt(p2)},{cell.label},"
            f"{len(cell.crossing_cycles)},{cell.polycycles},"
            f"{len(cell.sliding_cycles)},{flags}"
        )
    return "\n".join(lines) + "\n"


def curves_csv(curves: dict) -> str:
    lines = ["curve,param,p1,p2"]
    for name in sorted(curves):
        for param, p1, p2 in curves[name]:
            lines.append(f"{name},{_fmt(param)},{_fmt(p1)},{_fmt(p2)}")
    return "\n".join(lines) + "\n"


def write_text(path: str, text: str) -> None:
    try:
        with open(path, "w") as f:
            f.write(text)
    except OSError as e:
        raise IOFailure(f"cannot write {path}: {e}") from e
