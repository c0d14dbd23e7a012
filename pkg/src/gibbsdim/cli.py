"""Command-line dispatch: one model file in, deterministic CSV/JSON out.

Exit codes: 0 success, 2 validation or precondition failure, 3 numerical
non-convergence, 4 capacity cap.  Identical inputs (including seeds) produce
byte-identical outputs; every emitted file starts with a metadata header
carrying the tool version, the model hash, the solver tolerances, and the
Legendre sign convention.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .errors import ToolkitError, ValidationError
from .massdist import build_mass_distribution
from .model import ModelBundle, load_model
from .thermo import (LEGENDRE_CONVENTION, alpha_range, beta, beta_prime,
                     full_dim_alpha, pressure, spectrum_at, subaction)
from .wordsets import (build_postfix_set, counterexample_word, separating_word,
                       verify_postfix, window_family)

TOLERANCES = {
    "pressure_rtol": 1e-13,
    "beta_pressure_tol": 1e-11,
    "alpha_range_tol": 1e-10,
    "q_alpha_tol": 1e-9,
}


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.9g}"
    return str(x)


def _meta(bundle: ModelBundle) -> dict:
    return {
        "tool": f"gibbsdim {__version__}",
        "model": f"sha256:{bundle.sha256[:12]}",
        "tolerances": TOLERANCES,
        "legendre": LEGENDRE_CONVENTION,
    }


class Emitter:
    def __init__(self, args, bundle):
        self.out = args.out
        self.format = args.format
        self.meta = _meta(bundle)

    def _write(self, text: str):
        if self.out:
            with open(self.out, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)

    def rows(self, columns, rows, extra_meta=None):
        meta = dict(self.meta, **(extra_meta or {}))
        if self.format == "json":
            data = [dict(zip(columns, r)) for r in rows]
            self._write(json.dumps({"meta": meta, "data": data},
                                   sort_keys=True, indent=2) + "\n")
            return
        lines = [f"# {k}: {json.dumps(v, sort_keys=True)}" for k, v in sorted(meta.items())]
        lines.append(",".join(columns))
        lines.extend(",".join(_fmt(x) for x in r) for r in rows)
        self._write("\n".join(lines) + "\n")

    def obj(self, data):
        if self.format == "json":
            self._write(json.dumps({"meta": self.meta, "data": data},
                                   sort_keys=True, indent=2) + "\n")
            return
        lines = [f"# {k}: {json.dumps(v, sort_keys=True)}" for k, v in sorted(self.meta.items())]
        lines.extend(f"{k},{_fmt(v)}" for k, v in data.items())
        self._write("\n".join(lines) + "\n")

    def words(self, header: dict, words):
        if self.format == "json":
            self._write(json.dumps({"meta": self.meta, "header": header, "words": words},
                                   sort_keys=True, indent=2) + "\n")
            return
        lines = [f"# {k}: {json.dumps(v, sort_keys=True)}" for k, v in sorted(self.meta.items())]
        lines.append(json.dumps(header, sort_keys=True))
        lines.extend(words)
        self._write("\n".join(lines) + "\n")


def _parse_grid(text: str):
    try:
        a, b, step = (float(p) for p in text.split(":"))
    except ValueError:
        raise ValidationError("grid must be start:stop:step") from None
    if step <= 0:
        raise ValidationError("grid step must be positive")
    out = []
    x = a
    while x <= b + 1e-12:
        out.append(round(x, 12))
        x += step
    return out


def _parse_family(bundle: ModelBundle, text: str):
    if not text:
        raise ValidationError("need at least one word")
    return [bundle.spec.word(p) for p in text.split(",")]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", required=True, help="model file (JSON)")
    common.add_argument("--out", default=None, help="output path (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--tol", type=float, default=None,
                        help="evaluation tolerance override where applicable")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--phi", default=None, help="potential name (default: 'phi')")
    common.add_argument("--psi", default=None, help="metric potential name (default: 'psi')")
    common.add_argument("--potential", default=None, help="potential for single-potential commands")

    p = argparse.ArgumentParser(prog="gibbsdim", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("validate", parents=[common])
    sub.add_parser("pressure", parents=[common])

    q = sub.add_parser("beta", parents=[common])
    q.add_argument("--q", required=True, help="comma-separated q values")

    sp = sub.add_parser("spectrum", parents=[common])
    sp.add_argument("--alpha-grid", required=True, help="start:stop:step")

    sub.add_parser("alpha-range", parents=[common])
    sub.add_parser("alpha0", parents=[common])
    sub.add_parser("subaction", parents=[common])
    sub.add_parser("counterexample", parents=[common])

    w = sub.add_parser("words", parents=[common])
    w.add_argument("--K", type=float, required=True)
    w.add_argument("--m", type=int, required=True)
    w.add_argument("--cap", type=int, default=10_000_000)

    pf = sub.add_parser("postfix", parents=[common])
    pf.add_argument("--Kp", type=float, required=True)
    pf.add_argument("--K", type=float, required=True)
    pf.add_argument("--verify-maxlen", type=int, default=0)

    md = sub.add_parser("massdist", parents=[common])
    md.add_argument("mode", choices=("build", "sample", "certify"))
    md.add_argument("--s", type=float, required=True)
    md.add_argument("--F", required=True, help="comma-separated pattern words")
    md.add_argument("--K", type=float, default=None)
    md.add_argument("--depth", type=int, default=4)

    sw = sub.add_parser("separating-word", parents=[common])
    sw.add_argument("--F", required=True)

    cdf = sub.add_parser("cdf", parents=[common])
    cdf.add_argument("mode", choices=("eval", "curve"))
    cdf.add_argument("--x", type=float, default=None)
    cdf.add_argument("--eps", type=float, default=1e-9)
    cdf.add_argument("--resolution", type=int, default=256)

    hp = sub.add_parser("holder", parents=[common])
    hp.add_argument("--x", type=float, required=True)
    hp.add_argument("--alpha", type=float, required=True)
    hp.add_argument("--depth", type=int, default=30)

    cp = sub.add_parser("certified-point", parents=[common])
    cp.add_argument("--alpha", type=float, required=True)
    cp.add_argument("--l", type=int, default=2)
    cp.add_argument("--depth", type=int, default=4)
    cp.add_argument("--s-frac", type=float, default=0.5)

    return p


def _run(args) -> int:
    bundle = load_model(args.model)
    emit = Emitter(args, bundle)
    spec = bundle.spec

    if args.command == "validate":
        spec.require_mixing()
        report = {
            "symbols": spec.n,
            "mixing": True,
            "mixing_window": spec.mixing_window(),
            "potentials": ";".join(sorted(bundle.potentials)),
            "ifs": bundle.ifs is not None,
        }
        emit.obj(report)
        return 0

    if args.command == "pressure":
        value = pressure(bundle.potential(args.potential))
        emit.obj({"pressure": value})
        return 0

    if args.command == "beta":
        phi, psi = bundle.pair(args.phi, args.psi)
        rows = []
        for part in args.q.split(","):
            qv = float(part)
            b = beta(qv, phi, psi)
            rows.append((qv, b, beta_prime(qv, phi, psi)))
        emit.rows(("q", "beta", "beta_prime"), rows)
        return 0

    if args.command == "spectrum":
        phi, psi = bundle.pair(args.phi, args.psi)
        alphas = _parse_grid(args.alpha_grid)
        a0 = full_dim_alpha(phi, psi)
        if not any(abs(a - a0) < 1e-12 for a in alphas):
            alphas = sorted(alphas + [a0])
        rows = []
        for a in alphas:
            pt = spectrum_at(a, phi, psi)
            b_q = float("nan") if pt.endpoint else beta(pt.q_alpha, phi, psi)
            rows.append((pt.q_alpha, b_q, pt.alpha, pt.alpha, pt.value))
        emit.rows(("q", "beta", "beta_prime", "alpha", "b_alpha"), rows)
        return 0

    if args.command == "alpha-range":
        phi, psi = bundle.pair(args.phi, args.psi)
        lo, hi = alpha_range(phi, psi)
        emit.obj({"alpha_minus": lo, "alpha_plus": hi})
        return 0

    if args.command == "alpha0":
        emit.obj(bundle.cdf_model(args.potential).alpha0_report())
        return 0

    if args.command == "subaction":
        phi = bundle.potential(args.potential or ("phi" if "phi" in bundle.potentials else None))
        table = subaction(phi)
        rows = [(spec.word_str(w), v) for w, v in sorted(table.items())]
        emit.rows(("block", "value"), rows)
        return 0

    if args.command == "counterexample":
        phi, psi = bundle.pair(args.phi, args.psi)
        word = counterexample_word(phi, psi)
        emit.obj({
            "word": spec.word_str(word),
            "cylinder_sup_sum": phi.word_sum_bounds(word).sup,
        })
        return 0

    if args.command == "words":
        phi = bundle.potential(args.potential or ("phi" if "phi" in bundle.potentials else None))
        fam = window_family(phi, args.K, args.m, cap=args.cap)
        header = {"bound": fam.bound, "length": fam.length, "count": len(fam.words)}
        emit.words(header, [spec.word_str(w) for w in fam.words])
        return 0

    if args.command == "postfix":
        phi = bundle.potential(args.potential or ("phi" if "phi" in bundle.potentials else None))
        pset = build_postfix_set(phi, args.Kp, args.K)
        data = {
            "band": pset.band,
            "source_band": pset.source_band,
            "norm": pset.norm,
            "count": len(pset.words),
            "words": ";".join(spec.word_str(w) for w in pset.words),
        }
        if args.verify_maxlen:
            report = verify_postfix(pset, phi, args.verify_maxlen)
            data["verified_maxlen"] = report.max_len
            data["verified_words"] = report.checked
            data["verified"] = report.passed
            if not report.passed:
                data["witnesses"] = ";".join(spec.word_str(w) for w in report.failures)
        emit.obj(data)
        return 0

    if args.command == "massdist":
        phi, psi = bundle.pair(args.phi, args.psi)
        fam = _parse_family(bundle, args.F)
        dist = build_mass_distribution(phi, psi, args.s, fam, band=args.K)
        if args.mode == "build":
            emit.obj({
                "base_length": dist.base_length,
                "band": dist.band,
                "source_band": dist.source_band,
                "postfix_norm": dist.postfix.norm,
                "family_size": len(dist.family.words),
                "joined_word": spec.word_str(dist.joined),
                "spectrum_value": dist.spectrum_value,
            })
            return 0
        word = dist.sample(args.depth, args.seed)
        if args.mode == "sample":
            emit.obj({
                "word": spec.word_str(word),
                "mass": dist.mass(word),
                "depth": args.depth,
                "seed": args.seed,
            })
            return 0
        cert = dist.certify(word)
        payload = cert.to_dict()
        payload["word"] = spec.word_str(word)
        emit.obj(payload)
        return 0

    if args.command == "separating-word":
        fam = _parse_family(bundle, args.F)
        word = separating_word(spec, fam)
        emit.obj({"word": spec.word_str(word)})
        return 0

    if args.command == "cdf":
        model = bundle.cdf_model(args.potential)
        eps = args.tol if args.tol else args.eps
        if args.mode == "eval":
            if args.x is None:
                raise ValidationError("cdf eval needs --x")
            emit.obj({"x": args.x, "cdf": model.cdf(args.x, eps)})
            return 0
        rows = model.curve(args.resolution, eps)
        emit.rows(("x", "cdf"), rows)
        return 0

    if args.command == "holder":
        model = bundle.cdf_model(args.potential)
        probe = model.holder_probe(args.x, args.alpha, args.depth)
        rows = [(s, side, dc, ratio) for s, side, dc, ratio in probe.records]
        emit.rows(("scale", "side", "increment", "ratio"), rows, extra_meta={
            "exponent": probe.exponent,
            "ratio_min": probe.ratio_min,
            "ratio_max": probe.ratio_max,
        })
        return 0

    if args.command == "certified-point":
        model = bundle.cdf_model(args.potential)
        point = model.certified_point(args.alpha, l=args.l, depth=args.depth,
                                      seed=args.seed, s_frac=args.s_frac)
        emit.obj(point.to_dict(spec))
        return 0

    raise ValidationError(f"unknown command {args.command!r}")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _run(args)
    except ToolkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
