"""Experiment configuration: a JSON document validated field by field.

Schema (all keys optional unless noted)::

    {
      "model": "torus" | "braid",            # required unless a preset sets it
      "preset": "golden",                    # or "generators" below
      "generators": [                        # explicit support of the measure
        {"label": "A", "matrix": [[2, 1], [1, 1]], "weight": "1/2"},
        {"label": "s1", "letters": [1, -2], "weight": "1/2"}
      ],
      "strands": 3,                          # braid model with explicit generators
      "non_elementary": true,                # required with explicit generators
      "seed": 0,
      "paths": 200,
      "horizon": 10000,
      "horizons": [16, 32, 64],              # optional explicit schedule
      "curves": [[1, 0], [0, 1]],
      "anchor_distance": 1.0,                # half-width of the anchor neighbourhoods
      "walk": {"n_min": -16, "n_max": 16},
      "partition": {"n_min": -32, "n_max": 64},
      "cover": {"regular": 3} | {"balls": [[x, y, r], ...]},
      "tolerances": {"z": 3.0, "relative": 0.05, "one_sided": 0.02},
      "output": "out"
    }

Weights are exact rationals given as integers or strings such as ``"1/4"``.
Errors are raised as :class:`ConfigError` with the path of the offending
field, e.g. ``generators[2].weight``.
"""
from dataclasses import dataclass, field, asdict
from fractions import Fraction
import hashlib
import json
import os

__all__ = ["ConfigError", "ExperimentConfig", "load_config", "parse_config", "OUT_ENV"]

OUT_ENV = "RWENTROPY_OUT"

_KEYS = {"model", "preset", "generators", "strands", "non_elementary", "seed", "paths",
         "horizon", "horizons", "curves", "anchor_distance", "walk", "partition",
         "cover", "tolerances", "output"}


class ConfigError(ValueError):
    """Invalid configuration; ``path`` names the field."""

    def __init__(self, path, msg):
        super().__init__("%s: %s" % (path, msg))
        self.path = path


@dataclass
class ExperimentConfig:
    model: str
    preset: str = None
    generators: list = None
    strands: int = 3
    non_elementary: bool = True
    seed: int = 0
    paths: int = 20
    horizon: int = 1000
    horizons: list = None
    curves: list = None
    anchor_distance: float = 1.0
    walk: dict = field(default_factory=lambda: {"n_min": -16, "n_max": 16})
    partition: dict = field(default_factory=lambda: {"n_min": -32, "n_max": 64})
    cover: dict = field(default_factory=lambda: {"regular": 3})
    tolerances: dict = field(default_factory=lambda: {"z": 3.0, "relative": 0.05,
                                                      "one_sided": 0.02})
    output: str = "out"

    def canonical(self):
        """Canonical JSON text (sorted keys, weights as strings)."""
        return json.dumps(asdict(self), sort_keys=True, separators=(",", ":"))

    def digest(self):
        return hashlib.sha256(self.canonical().encode()).hexdigest()

    def measure(self):
        """The :class:`ProbabilityMeasure` described by the config."""
        from .presets import get_preset, torus_measure, braid_measure
        from .torus import MCGElement
        if self.preset is not None:
            return get_preset(self.preset).measure
        if self.model == "torus":
            pairs = []
            for g in self.generators:
                (a, b), (c, d) = g["matrix"]
                pairs.append((g["label"], MCGElement(a, b, c, d), Fraction(g["weight"])))
            return torus_measure(pairs)
        return braid_measure(self.strands, [(tuple(g["letters"]), Fraction(g["weight"]))
                                            for g in self.generators])

    def curve_list(self):
        from .presets import TORUS_CURVES, braid_curves
        if self.curves is not None:
            return [tuple(c) for c in self.curves]
        if self.model == "torus":
            return list(TORUS_CURVES)
        return [tuple(c) for c in braid_curves(self.strands)]

    def out_dir(self, override=None):
        return override or os.environ.get(OUT_ENV) or self.output


def _int(x, path, lo=None):
    if isinstance(x, bool) or not isinstance(x, int):
        raise ConfigError(path, "expected an integer, got %r" % (x,))
    if lo is not None and x < lo:
        raise ConfigError(path, "must be >= %d" % lo)
    return x


def _num(x, path, positive=True):
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ConfigError(path, "expected a number, got %r" % (x,))
    if positive and not x > 0:
        raise ConfigError(path, "must be > 0")
    return float(x)


def _weight(x, path):
    try:
        if isinstance(x, float):
            raise ValueError
        w = Fraction(x)
    except (ValueError, TypeError, ZeroDivisionError):
        raise ConfigError(path, "expected an exact rational such as \"1/4\", got %r" % (x,))
    if w <= 0:
        raise ConfigError(path, "weight must be > 0")
    return w


def _window(d, path):
    if not isinstance(d, dict):
        raise ConfigError(path, "expected an object with n_min and n_max")
    lo = _int(d.get("n_min"), path + ".n_min")
    hi = _int(d.get("n_max"), path + ".n_max")
    if not lo <= 0 <= hi:
        raise ConfigError(path, "need n_min <= 0 <= n_max")
    return {"n_min": lo, "n_max": hi}


def _generators(gens, model, strands):
    if not isinstance(gens, list) or not gens:
        raise ConfigError("generators", "expected a nonempty list")
    out, total, labels = [], Fraction(0), set()
    for i, g in enumerate(gens):
        p = "generators[%d]" % i
        if not isinstance(g, dict):
            raise ConfigError(p, "expected an object")
        label = g.get("label", str(i))
        if not isinstance(label, str) or label in labels:
            raise ConfigError(p + ".label", "labels must be distinct strings")
        labels.add(label)
        w = _weight(g.get("weight"), p + ".weight")
        total += w
        rec = {"label": label, "weight": str(w)}
        if model == "torus":
            M = g.get("matrix")
            ok = (isinstance(M, list) and len(M) == 2
                  and all(isinstance(r, list) and len(r) == 2 for r in M))
            if not ok:
                raise ConfigError(p + ".matrix", "expected a 2x2 integer matrix")
            for r in range(2):
                for c in range(2):
                    _int(M[r][c], "%s.matrix[%d][%d]" % (p, r, c))
            if M[0][0] * M[1][1] - M[0][1] * M[1][0] != 1:
                raise ConfigError(p + ".matrix", "determinant must be 1")
            rec["matrix"] = [list(M[0]), list(M[1])]
        else:
            L = g.get("letters")
            if not isinstance(L, list) or not L:
                raise ConfigError(p + ".letters", "expected a nonempty list of signed generators")
            for j, x in enumerate(L):
                _int(x, "%s.letters[%d]" % (p, j))
                if not 1 <= abs(x) <= strands - 1:
                    raise ConfigError("%s.letters[%d]" % (p, j),
                                      "generator index out of range 1..%d" % (strands - 1))
            rec["letters"] = list(L)
        out.append(rec)
    if total != 1:
        raise ConfigError("generators", "weights sum to %s, not 1" % total)
    return out


def parse_config(doc, seed=None):
    """Validate a decoded JSON document; ``seed`` overrides the config seed."""
    from .presets import PRESETS
    if not isinstance(doc, dict):
        raise ConfigError("<root>", "expected a JSON object")
    extra = sorted(set(doc) - _KEYS)
    if extra:
        raise ConfigError(extra[0], "unknown field")
    kw = {}
    preset = doc.get("preset")
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError("preset", "unknown preset %r (known: %s)"
                              % (preset, ", ".join(sorted(PRESETS))))
        if "generators" in doc:
            raise ConfigError("generators", "give either a preset or generators, not both")
        P = PRESETS[preset]
        model = doc.get("model", P.model)
        if model != P.model:
            raise ConfigError("model", "preset %r belongs to the %s model" % (preset, P.model))
        kw["non_elementary"] = P.non_elementary
        if "non_elementary" in doc:
            if doc["non_elementary"] is not P.non_elementary:
                raise ConfigError("non_elementary", "conflicts with the preset's assertion")
    else:
        model = doc.get("model")
        if model not in ("torus", "braid"):
            raise ConfigError("model", "expected \"torus\" or \"braid\"")
        if "generators" not in doc:
            raise ConfigError("generators", "required without a preset")
        if not isinstance(doc.get("non_elementary"), bool):
            raise ConfigError("non_elementary",
                              "explicit generators need a true/false non-elementary assertion")
        kw["non_elementary"] = doc["non_elementary"]
        if "strands" in doc:
            kw["strands"] = _int(doc["strands"], "strands", lo=3)
        kw["generators"] = _generators(doc["generators"], model, kw.get("strands", 3))
    kw["model"] = model
    kw["preset"] = preset
    if "seed" in doc:
        kw["seed"] = _int(doc["seed"], "seed", lo=0)
    if seed is not None:
        kw["seed"] = _int(seed, "--seed", lo=0)
    if "paths" in doc:
        kw["paths"] = _int(doc["paths"], "paths", lo=1)
    if "horizon" in doc:
        kw["horizon"] = _int(doc["horizon"], "horizon", lo=2)
    if "horizons" in doc:
        hs = doc["horizons"]
        if not isinstance(hs, list) or not hs:
            raise ConfigError("horizons", "expected a nonempty list")
        for i, h in enumerate(hs):
            _int(h, "horizons[%d]" % i, lo=2)
        if any(b <= a for a, b in zip(hs, hs[1:])):
            raise ConfigError("horizons", "must be strictly increasing")
        kw["horizons"] = list(hs)
        kw["horizon"] = hs[-1]
    if "curves" in doc:
        cs = doc["curves"]
        if not isinstance(cs, list) or not cs:
            raise ConfigError("curves", "expected a nonempty list")
        for i, c in enumerate(cs):
            if not isinstance(c, list) or not c:
                raise ConfigError("curves[%d]" % i, "expected a list of integers")
            for j, x in enumerate(c):
                _int(x, "curves[%d][%d]" % (i, j))
            if not any(c):
                raise ConfigError("curves[%d]" % i, "curve must be nonzero")
            if model == "torus" and len(c) != 2:
                raise ConfigError("curves[%d]" % i, "torus curves are integer pairs")
        kw["curves"] = [list(c) for c in cs]
    if "anchor_distance" in doc:
        kw["anchor_distance"] = _num(doc["anchor_distance"], "anchor_distance")
    for w in ("walk", "partition"):
        if w in doc:
            kw[w] = _window(doc[w], w)
    if "cover" in doc:
        kw["cover"] = _cover(doc["cover"])
    if "tolerances" in doc:
        t = doc["tolerances"]
        if not isinstance(t, dict):
            raise ConfigError("tolerances", "expected an object")
        bad = sorted(set(t) - {"z", "relative", "one_sided"})
        if bad:
            raise ConfigError("tolerances." + bad[0], "unknown field")
        tol = {"z": 3.0, "relative": 0.05, "one_sided": 0.02}
        for k in t:
            tol[k] = _num(t[k], "tolerances." + k)
        kw["tolerances"] = tol
    if "output" in doc:
        if not isinstance(doc["output"], str) or not doc["output"]:
            raise ConfigError("output", "expected a directory name")
        kw["output"] = doc["output"]
    return ExperimentConfig(**kw)


def _cover(c):
    if not isinstance(c, dict) or len(c) != 1:
        raise ConfigError("cover", "expected {\"regular\": k} or {\"balls\": [...]}")
    if "regular" in c:
        return {"regular": _int(c["regular"], "cover.regular", lo=2)}
    if "balls" in c:
        balls = c["balls"]
        if not isinstance(balls, list) or not balls:
            raise ConfigError("cover.balls", "expected a nonempty list")
        for i, b in enumerate(balls):
            if not isinstance(b, list) or len(b) != 3:
                raise ConfigError("cover.balls[%d]" % i, "expected [x, y, radius]")
            for j in range(3):
                _num(b[j], "cover.balls[%d][%d]" % (i, j), positive=(j == 2))
            if not b[2] < 0.5:
                raise ConfigError("cover.balls[%d][2]" % i, "radius must be < 1/2")
        return {"balls": [list(map(float, b)) for b in balls]}
    raise ConfigError("cover", "expected {\"regular\": k} or {\"balls\": [...]}")


def load_config(path, seed=None):
    """Read and validate the JSON config at ``path``."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as e:
        raise ConfigError("--config", "cannot read %s (%s)" % (path, e.strerror))
    except json.JSONDecodeError as e:
        raise ConfigError("--config", "invalid JSON at line %d: %s" % (e.lineno, e.msg))
    return parse_config(doc, seed=seed)
