"""Model file ingestion.

A model file is JSON with sections:

    alphabet    list of symbol names
    incidence   list of 0/1 rows
    potentials  name -> {"depth": d, "table": {word: value}}  (word keys use
                symbol names, comma-separated when names are multi-character;
                depth-1 tables may instead give "values": [one per symbol])
    ifs         optional: {"interval": [u, v], "maps": {name: {"rate": r, "offset": t}}}
    gibbs       optional: name of the potential to normalize to zero pressure

Validation failures name the violated invariant.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .ifs import AffineIfs, CdfModel
from .potentials import LocallyConstantPotential
from .sft import SftSpec


@dataclass
class ModelBundle:
    path: str
    sha256: str
    spec: SftSpec
    potentials: dict
    ifs: AffineIfs
    gibbs_name: str

    def potential(self, name: str = None) -> LocallyConstantPotential:
        if name is None:
            if self.gibbs_name is not None:
                name = self.gibbs_name
            elif len(self.potentials) == 1:
                name = next(iter(self.potentials))
            else:
                raise ValidationError(
                    f"model defines {sorted(self.potentials)}; pick one explicitly"
                )
        if name not in self.potentials:
            raise ValidationError(f"model has no potential named {name!r}")
        return self.potentials[name]

    def pair(self, phi_name: str = None, psi_name: str = None):
        phi = self.potential(phi_name or ("phi" if "phi" in self.potentials else None))
        psi = self.potential(psi_name or ("psi" if "psi" in self.potentials else None))
        return phi, psi

    def cdf_model(self, potential_name: str = None) -> CdfModel:
        if self.ifs is None:
            raise ValidationError("model has no 'ifs' section")
        name = potential_name or self.gibbs_name
        if name is None:
            raise ValidationError("model needs a 'gibbs' potential name for CDF work")
        return CdfModel(self.ifs, self.potential(name))


def _require(doc: dict, key: str):
    if key not in doc:
        raise ValidationError(f"model file lacks required section {key!r}")
    return doc[key]


def load_model(path: str) -> ModelBundle:
    with open(path, "rb") as fh:
        raw = fh.read()
    sha = hashlib.sha256(raw).hexdigest()
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"model file is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ValidationError("model file must contain a JSON object")

    alphabet = _require(doc, "alphabet")
    incidence = _require(doc, "incidence")
    spec = SftSpec(alphabet=tuple(alphabet), incidence=np.asarray(incidence))

    potentials = {}
    for name, body in doc.get("potentials", {}).items():
        if "values" in body:
            pot = LocallyConstantPotential.from_values(spec, body["values"])
            if int(body.get("depth", 1)) != 1:
                raise ValidationError(f"potential {name!r}: 'values' form is depth 1")
        else:
            depth = int(body["depth"])
            try:
                entries = tuple(
                    (spec.word(k), float(v)) for k, v in body["table"].items()
                )
            except KeyError:
                raise ValidationError(f"potential {name!r} needs 'depth' and 'table'") from None
            pot = LocallyConstantPotential(spec=spec, depth=depth, entries=entries)
        potentials[name] = pot

    ifs = None
    if "ifs" in doc:
        body = doc["ifs"]
        interval = tuple(float(x) for x in _require(body, "interval"))
        maps = _require(body, "maps")
        missing = [a for a in spec.alphabet if a not in maps]
        if missing:
            raise ValidationError(f"ifs section lacks maps for symbols {missing}")
        rates = np.array([float(maps[a]["rate"]) for a in spec.alphabet])
        offsets = np.array([float(maps[a]["offset"]) for a in spec.alphabet])
        ifs = AffineIfs(spec=spec, interval=interval, rates=rates, offsets=offsets)

    gibbs = doc.get("gibbs")
    if gibbs is not None and gibbs not in potentials:
        raise ValidationError(f"gibbs names unknown potential {gibbs!r}")

    return ModelBundle(path=str(path), sha256=sha, spec=spec,
                       potentials=potentials, ifs=ifs, gibbs_name=gibbs)
