"""Configuration-driven command line entry point.

Four subcommands bind the computational modules into reproducible runs:

    snslab landau  --c 2 --kappa
    snslab certify --lemma weak-l3 --trials 100 --seed 7
    snslab heat    --curve power --alpha 0.8 --fit-decay
    snslab solve   --mode omega --c 8 --alpha 0.8

Runs are fully deterministic: the same configuration and seed produce
byte-identical CSV output.  Every CSV starts with provenance comment lines
(`# version`, `# config sha256`).  Flags can also be given in a key=value
config file (``--config path``); explicit flags win on conflict.

Exit codes: 0 success, 2 config error, 3 non-convergence, 4 smallness
precondition violated.
"""

from __future__ import annotations

import hashlib
import io
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__
from .curves import Curve, constant_curve, linear_curve, power_curve
from .errors import (
    ConfigError,
    DivergedIterate,
    NotConverged,
    QuadratureNotConverged,
    SmallnessViolated,
    SnslabError,
)

_BOOL = {"true": True, "false": False}


def _parse_bool(text: str) -> bool:
    try:
        return _BOOL[text.lower()]
    except KeyError:
        raise ValueError(f"expected true/false, got {text!r}")


# option name -> (converter, default, help)
_COMMON = {
    "seed": (int, 0, "RNG seed for randomized suites"),
    "out": (str, "-", "output CSV path ('-' = stdout)"),
    "config": (str, "", "key=value config file; explicit flags win"),
}

_SCHEMAS: dict[str, dict] = {
    "landau": {
        **_COMMON,
        "c": (float, 2.0, "swirl parameter, |c| > 1"),
        "kappa": (_parse_bool, False, "emit the flux constant kappa(c)"),
        "eval": (str, "", "evaluate V, Q at point 'x1,x2,x3'"),
        "residual-sweep": (_parse_bool, False, "pointwise stationary residual sweep"),
        "pairing": (_parse_bool, False, "distributional pairing against a bump"),
    },
    "certify": {
        **_COMMON,
        "lemma": (str, "weak-l3", "product|interpolation|gradient|weak-l3|tensor"),
        "trials": (int, 100, "number of random probe fields"),
        "N": (int, 48, "lattice points per axis"),
        "L": (float, 32.0, "box length"),
    },
    "heat": {
        **_COMMON,
        "curve": (str, "const", "const|linear|power"),
        "alpha": (float, 0.8, "Hoelder exponent of the power curve, in (1/2, 1]"),
        "speed": (float, 1.0, "velocity magnitude of the linear curve (along e1)"),
        "t": (float, 0.25, "evaluation time"),
        "q": (float, 4.0, "Lebesgue exponent for the decay fit"),
        "fit-decay": (_parse_bool, False, "fit the L^q decay slope of omega0"),
        "t-min": (float, 4e-3, "smallest fit time"),
        "t-max": (float, 1e-1, "largest fit time"),
        "t-count": (int, 8, "number of log-spaced fit times"),
        "N": (int, 64, "lattice points per axis"),
        "L": (float, 8.0, "box length"),
        "dump-fields": (str, "", "directory for SNSFIELD dumps"),
    },
    "solve": {
        **_COMMON,
        "mode": (str, "u", "u|omega"),
        "c": (float, float("nan"), "swirl parameter (required for omega mode)"),
        "kappa": (float, float("nan"), "force amplitude (u mode; default kappa(c))"),
        "curve": (str, "const", "const|linear|power"),
        "alpha": (float, 0.8, "Hoelder exponent of the power curve, in (1/2, 1]"),
        "speed": (float, 1.0, "velocity of the linear curve (along e1)"),
        "N": (int, 64, "lattice points per axis"),
        "L": (float, 32.0, "box length"),
        "T": (float, 0.5, "time horizon"),
        "steps": (int, 64, "time steps"),
        "tol": (float, 1e-10, "Picard increment tolerance"),
        "max-iter": (int, 40, "Picard iteration cap"),
        "allow-large-kappa": (_parse_bool, False, "downgrade smallness to best effort"),
        "report": (str, "-", "report CSV path ('-' = stdout)"),
        "dump-fields": (str, "", "directory for SNSFIELD dumps"),
    },
}


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    options: dict

    def canonical_text(self) -> str:
        lines = [f"subcommand={self.subcommand}"]
        for key in sorted(self.options):
            val = self.options[key]
            if isinstance(val, bool):
                text = "true" if val else "false"
            elif isinstance(val, float):
                text = repr(val)
            else:
                text = str(val)
            lines.append(f"{key}={text}")
        return "\n".join(lines) + "\n"

    def sha256(self) -> str:
        return hashlib.sha256(self.canonical_text().encode()).hexdigest()


def _convert(sub: str, key: str, raw, schema) -> object:
    conv = schema[key][0]
    if isinstance(raw, bool) or not isinstance(raw, str):
        return raw
    try:
        return conv(raw)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{sub} --{key}: {exc}") from None


def _validate(cfg: RunConfig) -> None:
    sub, opt = cfg.subcommand, cfg.options
    if sub in ("landau",) and not abs(opt["c"]) > 1.0:
        raise ConfigError(f"landau --c: |c| > 1 required, got {opt['c']}")
    if sub in ("heat", "solve"):
        if opt["curve"] not in ("const", "linear", "power"):
            raise ConfigError(f"{sub} --curve: unknown kind {opt['curve']!r}")
        if opt["curve"] == "power" and not 0.5 < opt["alpha"] <= 1.0:
            raise ConfigError(
                f"{sub} --alpha: Hoelder exponent must lie in (1/2, 1], got {opt['alpha']}"
            )
        if opt["N"] <= 0 or opt["N"] % 2:
            raise ConfigError(f"{sub} --N: positive even integer required")
        if opt["L"] <= 0:
            raise ConfigError(f"{sub} --L: positive box length required")
    if sub == "solve":
        if opt["mode"] not in ("u", "omega"):
            raise ConfigError(f"solve --mode: u or omega, got {opt['mode']!r}")
        have_c = not np.isnan(opt["c"])
        have_kappa = not np.isnan(opt["kappa"])
        if have_c and not abs(opt["c"]) > 1.0:
            raise ConfigError(f"solve --c: |c| > 1 required, got {opt['c']}")
        if opt["mode"] == "omega" and not have_c:
            raise ConfigError("solve --mode omega requires --c (kappa is derived)")
        if opt["mode"] == "u" and not (have_c or have_kappa):
            raise ConfigError("solve --mode u requires --kappa or --c")
        if opt["steps"] < 2 or opt["T"] <= 0 or opt["tol"] <= 0:
            raise ConfigError("solve: need steps >= 2, T > 0, tol > 0")
    if sub == "certify":
        known = ("product", "interpolation", "gradient", "weak-l3", "tensor")
        if opt["lemma"] not in known:
            raise ConfigError(f"certify --lemma: expected one of {known}")
        if opt["trials"] <= 0:
            raise ConfigError("certify --trials: positive count required")
    if sub == "heat":
        if opt["t"] <= 0 or opt["t-min"] <= 0 or opt["t-max"] <= opt["t-min"]:
            raise ConfigError("heat: need t > 0 and 0 < t-min < t-max")


def _parse_file(text: str, path: str = "<config>") -> dict:
    pairs = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {stripped!r}")
        key, _, val = stripped.partition("=")
        pairs[key.strip()] = val.strip()
    return pairs


def parse_config(argv_or_text) -> RunConfig:
    """Build a validated RunConfig from argv (list) or key=value text (str).

    Unknown keys are rejected with the offending flag named; every violation
    carries its locus.  The result round-trips: parsing canonical_text()
    reproduces an identical canonical form.
    """
    if isinstance(argv_or_text, str):
        pairs = _parse_file(argv_or_text)
        if "subcommand" not in pairs:
            raise ConfigError("<config>: missing subcommand=")
        sub = pairs.pop("subcommand")
        raw = pairs
    else:
        argv = list(argv_or_text)
        if not argv:
            raise ConfigError("missing subcommand (landau|certify|heat|solve)")
        sub = argv[0]
        raw = {}
        i = 1
        while i < len(argv):
            tok = argv[i]
            if not tok.startswith("--"):
                raise ConfigError(f"unexpected argument {tok!r}")
            key = tok[2:]
            schema = _SCHEMAS.get(sub, {})
            if key in schema and schema[key][0] is _parse_bool and (
                i + 1 >= len(argv) or argv[i + 1].startswith("--")
            ):
                raw[key] = "true"
                i += 1
                continue
            if i + 1 >= len(argv):
                raise ConfigError(f"--{key}: missing value")
            raw[key] = argv[i + 1]
            i += 2
    if sub not in _SCHEMAS:
        raise ConfigError(f"unknown subcommand {sub!r} (landau|certify|heat|solve)")
    schema = _SCHEMAS[sub]
    unknown = sorted(set(raw) - set(schema))
    if unknown:
        raise ConfigError(f"{sub}: unknown option(s) {', '.join('--' + u for u in unknown)}")
    merged = {}
    if "config" in raw and raw["config"]:
        with open(raw["config"], "r", encoding="utf-8") as fh:
            file_pairs = _parse_file(fh.read(), raw["config"])
        file_pairs.pop("subcommand", None)
        bad = sorted(set(file_pairs) - set(schema))
        if bad:
            raise ConfigError(f"{raw['config']}: unknown key(s) {', '.join(bad)}")
        merged.update(file_pairs)
    merged.update(raw)  # explicit flags win
    options = {}
    for key, (_conv, default, _help) in schema.items():
        if key in merged:
            options[key] = _convert(sub, key, merged[key], schema)
        else:
            options[key] = default
    cfg = RunConfig(sub, options)
    _validate(cfg)
    return cfg


# -- CSV output ----------------------------------------------------------------

def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return repr(x)
    return str(x)


class _CsvSink:
    def __init__(self, cfg: RunConfig, path: str, stream):
        self.buffer = io.StringIO()
        self.path = path
        self.stream = stream
        self.buffer.write(f"# snslab {__version__}\n")
        self.buffer.write(f"# config sha256 {cfg.sha256()}\n")

    def header(self, *cols) -> None:
        self.buffer.write(",".join(cols) + "\n")

    def row(self, *vals) -> None:
        self.buffer.write(",".join(_fmt(v) for v in vals) + "\n")

    def flush(self) -> None:
        text = self.buffer.getvalue()
        if self.path == "-":
            self.stream.write(text)
        else:
            with open(self.path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)


def _make_curve(opt: dict) -> Curve:
    kind = opt["curve"]
    if kind == "const":
        return constant_curve()
    if kind == "linear":
        return linear_curve((opt["speed"], 0.0, 0.0))
    return power_curve(opt["alpha"])


def _run_landau(cfg: RunConfig, sink: _CsvSink) -> int:
    from . import landau

    opt = cfg.options
    sol = landau.LandauSolution(opt["c"])
    wrote = False
    if opt["kappa"]:
        sink.header("c", "kappa")
        sink.row(opt["c"], landau.kappa(opt["c"]))
        wrote = True
    if opt["eval"]:
        try:
            x = np.array([float(s) for s in opt["eval"].split(",")])
            assert x.size == 3
        except Exception:
            raise ConfigError(f"landau --eval: expected 'x1,x2,x3', got {opt['eval']!r}")
        V = landau.eval_velocity(sol, x)
        Q = landau.eval_pressure(sol, x)
        if not wrote:
            sink.header("c", "x1", "x2", "x3", "V1", "V2", "V3", "Q")
        sink.row(opt["c"], *x, *V, float(Q))
        wrote = True
    if opt["residual-sweep"]:
        sink.header("c", "radius", "h", "mom1", "mom2", "mom3", "div", "scale")
        rng = np.random.default_rng(opt["seed"])
        for radius in np.geomspace(0.1, 10.0, 8):
            direction = rng.standard_normal(3)
            direction /= np.linalg.norm(direction)
            x = radius * direction
            h = 1e-3 * radius
            res = landau.stationary_residual(sol, x, h)
            sink.row(opt["c"], radius, h, *res.momentum, res.divergence,
                     res.gradient_pressure_scale)
        wrote = True
    if opt["pairing"]:
        sink.header("c", "k", "value", "target", "rel_err")
        bump = landau.SmoothBump.make(radii=(1.0, 1.0, 1.0))
        kap = landau.kappa(opt["c"])
        for k in (1, 2, 3):
            res = landau.weak_pairing(sol, bump, k)
            target = kap if k == 1 else 0.0
            rel = abs(res.value - target) / abs(kap)
            sink.row(opt["c"], k, res.value, target, rel)
        wrote = True
    if not wrote:
        raise ConfigError("landau: pick at least one of --kappa/--eval/--residual-sweep/--pairing")
    return 0


def _run_certify(cfg: RunConfig, sink: _CsvSink) -> int:
    from . import norms
    from .spectral import FourierLattice

    opt = cfg.options
    lat = FourierLattice(opt["N"], opt["L"])
    lemma = opt["lemma"]
    trials = opt["trials"]
    sink.header("lemma", "trial", "ratio", "bound", "pass")
    if lemma == "product":
        bound = norms.product_constant(lat, 1.0, 1.0)
        fields = norms.random_pm2_family(lat, opt["seed"], 2 * trials)
        for i in range(trials):
            rep = norms.certify_product(fields[2 * i], fields[2 * i + 1], 1.0, 1.0, bound=bound)
            sink.row(lemma, i, rep.ratio, rep.bound, rep.passed)
    elif lemma == "tensor":
        fields = norms.random_pm2_family(lat, opt["seed"], trials, components=3)
        for i, f in enumerate(fields):
            rep = norms.certify_tensor(f)
            sink.row(lemma, i, rep.ratio, rep.bound, rep.passed)
    else:
        fields = norms.random_pm2_family(lat, opt["seed"], trials)
        for i, f in enumerate(fields):
            if lemma == "interpolation":
                rep = norms.certify_interpolation(f, 2.0, 2.5, 4.0)
            elif lemma == "gradient":
                rep = norms.certify_gradient_embedding(f, 2.8)
            else:
                rep = norms.certify_weak_l3(f)
            sink.row(lemma, i, rep.ratio, rep.bound, rep.passed)
    return 0


def _run_heat(cfg: RunConfig, sink: _CsvSink) -> int:
    import os

    from . import heat
    from .norms import pm_norm
    from .spectral import FourierLattice, inverse_transform, write_field
    from .norms import lq_norm

    opt = cfg.options
    lat = FourierLattice(opt["N"], opt["L"])
    curve = _make_curve(opt)
    alpha = opt["alpha"] if opt["curve"] == "power" else 1.0
    a_high = min(1.0 + 2.0 * alpha, 3.0)
    sink.header("t", "q", "lq_norm", "pm2", "pm_a")
    if opt["fit-decay"]:
        ts = np.geomspace(opt["t-min"], opt["t-max"], opt["t-count"])
        fit = heat.lq_decay_fit(curve, opt["q"], ts, lat)
        for t, nrm in zip(fit["times"], fit["norms"]):
            w0 = heat.omega0(curve, float(t), lat, rtol=1e-6)
            sink.row(float(t), opt["q"], float(nrm), pm_norm(w0, 2.0).value,
                     pm_norm(w0, a_high).value)
        sink.buffer.write(f"# fitted slope {fit['slope']!r} predicted {fit['predicted']!r}\n")
    else:
        t = opt["t"]
        u = heat.heat_fourier_solution(curve, t, lat)
        w0 = heat.omega0(curve, t, lat)
        qn = lq_norm(inverse_transform(w0), opt["q"]) if lq_admissible(opt["q"], alpha) else float("nan")
        sink.row(t, opt["q"], qn, pm_norm(w0, 2.0).value, pm_norm(w0, a_high).value)
        if opt["dump-fields"]:
            os.makedirs(opt["dump-fields"], exist_ok=True)
            write_field(os.path.join(opt["dump-fields"], "u_hat.snsfield"), u)
            write_field(os.path.join(opt["dump-fields"], "omega0_hat.snsfield"), w0)
    return 0


def lq_admissible(q: float, alpha: float) -> bool:
    from .heat import lq_decay_admissible

    return lq_decay_admissible(q, alpha)


def _run_solve(cfg: RunConfig, sink: _CsvSink) -> int:
    import os

    from . import solver
    from .spectral import FourierLattice, SpectralField, write_field

    opt = cfg.options
    lat = FourierLattice(opt["N"], opt["L"])
    curve = _make_curve(opt)
    mode = "full_u" if opt["mode"] == "u" else "remainder_omega"
    kap = None if np.isnan(opt["kappa"]) else opt["kappa"]
    c = None if np.isnan(opt["c"]) else opt["c"]
    scfg = solver.SolverConfig(
        lattice=lat,
        curve=curve,
        horizon=opt["T"],
        steps=opt["steps"],
        kappa=kap,
        c=c,
        tolerance=opt["tol"],
        max_iterations=opt["max-iter"],
        mode=mode,
        smallness=not opt["allow-large-kappa"],
    )
    result = (
        solver.picard_solve_u(scfg) if mode == "full_u" else solver.picard_solve_omega(scfg)
    )
    residual = solver.mild_residual_check(result)["max"]
    rep = result.report
    sink.header("iter", "norm_pm2", "norm_pm_a", "increment", "ratio",
                "divergence_max", "residual")
    for i in range(rep.iterations):
        ratio = rep.ratios[i - 1] if i >= 1 else float("nan")
        res = residual if i == rep.iterations - 1 else float("nan")
        sink.row(i + 1, rep.norm_pm2[i], rep.norm_pm_a[i], rep.increments[i],
                 ratio, rep.divergence_max[i], res)
    sink.buffer.write(f"# eta2 {rep.eta2!r} kappa_threshold {rep.kappa_threshold!r}\n")
    sink.buffer.write(f"# boundary_decay {rep.boundary_decay!r}\n")
    if opt["dump-fields"]:
        os.makedirs(opt["dump-fields"], exist_ok=True)
        write_field(os.path.join(opt["dump-fields"], "u_final.snsfield"),
                    result.field(len(result.times) - 1))
        p = solver.pressure_recover(result, len(result.times) - 1)
        write_field(os.path.join(opt["dump-fields"], "p_final.snsfield"), p.values)
    return 0


def run(cfg: RunConfig, stream=None) -> int:
    """Execute a validated configuration; returns the process exit code."""
    stream = stream if stream is not None else sys.stdout
    path = cfg.options.get("report" if cfg.subcommand == "solve" else "out", "-")
    if cfg.subcommand == "solve":
        path = cfg.options["report"]
    else:
        path = cfg.options["out"]
    sink = _CsvSink(cfg, path, stream)
    runner = {
        "landau": _run_landau,
        "certify": _run_certify,
        "heat": _run_heat,
        "solve": _run_solve,
    }[cfg.subcommand]
    code = runner(cfg, sink)
    sink.flush()
    return code


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        cfg = parse_config(argv)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        print("hint: run with a known subcommand and --key value flags; "
              "see README for the flag tables", file=sys.stderr)
        return 2
    try:
        return run(cfg)
    except SmallnessViolated as exc:
        print(f"smallness precondition violated: {exc}", file=sys.stderr)
        print("hint: lower |kappa| (or raise |c|), or pass --allow-large-kappa "
              "for a best-effort run", file=sys.stderr)
        return 4
    except (NotConverged, DivergedIterate, QuadratureNotConverged) as exc:
        print(f"non-convergence: {exc}", file=sys.stderr)
        print("hint: raise --max-iter, refine --steps, or reduce the forcing",
              file=sys.stderr)
        return 3
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
