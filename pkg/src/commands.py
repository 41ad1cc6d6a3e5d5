"""
Command registry.

Each command turns a RunConfig into a Plan: validation happens while the
plan is built, compute only when it is executed, so --dry-run validates and
lists tasks without touching a transform.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from . import envelopes
from .config import RunConfig
from .errors import ConfigError, ValidationError
from .experiments import ScanResult, run_points, verdict
from .experiments.inequalities import (
    dual_range_scan,
    khintchine_scan,
    lambda_p_scan,
    weak_type_scan,
    zygmund_scan,
)
from .experiments.lower_bounds import (
    DESK_N_MAX,
    cardinality_count,
    cardinality_scan,
    paley_scan,
    pichorides_scan,
    sharpness_scan,
    sigma_scan,
)
from .kernels import (
    de_la_vallee_poussin,
    dirichlet_block,
    extremal_fM,
    extremal_fN,
    fejer,
    random_analytic,
)
from .multipliers import SignVector, mikhlin_constant, randomized_sum, usable_projections
from .pool import resolve_jobs
from .sequences import (
    LacunarySequence,
    check_near_ratio,
    construct_near_ratio,
    decompose_into_lacunary,
    load_sequence,
    ratio,
    refine,
    rescale_near_ratio,
    sequence_stats,
    sigma_block_example,
)
from .square_function import block_norms, refinement_pieces, square_function, square_function_2d
from .torus import TrigPoly, TrigPoly2D, evaluate, evaluate_2d, grid_points, lp_norm
from .writers import PlotSpec, Report, report_from_scan

log = logging.getLogger("lp-lab")

# ---------------------------------------------------------------------------
# Default grids
# ---------------------------------------------------------------------------
CARDINALITY_LAMBDAS = [1.002, 1.005, 1.01, 1.02, 1.05]
COARSE_LAMBDAS = [1.05, 1.1, 1.15, 1.2, 1.25]
DESK_LAMBDAS = [1.01, 1.015, 1.02, 1.03, 1.05]
DESK_NS = [2 ** 9, 2 ** 10, 2 ** 11, 2 ** 12, 2 ** 13]
MIKHLIN_LAMBDAS = [1.05, 1.1, 1.15, 1.2, 1.25]
PICHORIDES_PS = [1.2, 1.3, 1.4, 1.5]
SIGMAS = [4, 8, 16, 32]
ZYGMUND_SIGMAS = [4, 8, 16]
LAMBDA_P_PS = [2, 4, 8]
DUAL_PS = [3, 4, 6, 8]
KHINTCHINE_PS = [1, 1.2, 1.5, 2]
DEFAULT_N = 4096
SIGMA_M = 2 ** 13
ZYGMUND_M = 2 ** 12
SIGMA_EXAMPLE_M = 256

INPUT_KINDS = ("fN", "fM", "fejer", "dvp", "random", "dirichlet")


@dataclass
class Plan:
    tasks: list[str]
    execute: Callable[[], Report]


COMMANDS: dict[str, Callable[[RunConfig], Plan]] = {}
HELP: dict[str, str] = {}


def command(name: str, help: str):
    def register(build):
        COMMANDS[name] = build
        HELP[name] = help
        return build
    return register


def build_plan(config: RunConfig) -> Plan:
    if config.command not in COMMANDS:
        raise ConfigError(f"Unknown command: {config.command}")
    return COMMANDS[config.command](config)


# ---------------------------------------------------------------------------
# Shared argument handling
# ---------------------------------------------------------------------------
def parse_input(spec: str, default_seed: int = 0) -> TrigPoly:
    """
    Test function from a short spec:
        fN:n  fM:n  fejer:n  dvp:n  random:deg[:seed]  dirichlet:lo:hi
    """
    name, _, rest = spec.strip().partition(":")
    try:
        args = [int(a) for a in rest.split(":")] if rest else []
    except ValueError:
        raise ConfigError(f"--input {spec!r}: arguments must be integers")

    arity = {"fN": (1,), "fM": (1,), "fejer": (1,), "dvp": (1,), "random": (1, 2), "dirichlet": (2,)}
    if name not in arity:
        raise ConfigError(f"--input {spec!r}: unknown kind, expected one of {', '.join(INPUT_KINDS)}")
    if len(args) not in arity[name]:
        raise ConfigError(f"--input {spec!r}: wrong number of arguments")

    if name == "fN":
        return extremal_fN(args[0])
    if name == "fM":
        return extremal_fM(args[0])
    if name == "fejer":
        return fejer(args[0])
    if name == "dvp":
        return de_la_vallee_poussin(args[0])
    if name == "random":
        return random_analytic(args[0], args[1] if len(args) > 1 else default_seed)
    return dirichlet_block(args[0], args[1])


def _load(path: str) -> LacunarySequence:
    try:
        return load_sequence(Path(path))
    except FileNotFoundError:
        raise ConfigError(f"Sequence file not found at {path}")
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: not valid JSON ({e})")


def _sequence_source(config: RunConfig) -> tuple[str, Callable[[], LacunarySequence]]:
    """Description and loader for --seq-file or --lambda/--count."""
    if config.seq_file:
        seq = _load(config.seq_file)
        return f"sequence {config.seq_file} ({len(seq)} terms)", lambda: seq
    if config.lam is not None:
        check_near_ratio(config.lam)
        if config.count < 2:
            raise ValidationError(f"count must be >= 2, got {config.count}")
        return (
            f"construct lambda={config.lam} count={config.count}",
            lambda: construct_near_ratio(config.lam, config.count),
        )
    raise ConfigError(f"{config.command} needs --seq-file or --lambda")


def _require_input(config: RunConfig) -> str:
    if not config.input:
        raise ConfigError(f"{config.command} needs --input (kinds: {', '.join(INPUT_KINDS)})")
    for part in config.input.split("*"):
        parse_input(part, config.base_seed)
    return config.input


def _check_lambdas(lambdas: list[float]):
    for lam in lambdas:
        check_near_ratio(lam)


def _check_ps(ps: list[float], lo: float = 1.0, hi: float = float("inf")):
    for p in ps:
        if not lo <= p <= hi:
            raise ValidationError(f"p must lie in [{lo}, {hi}], got {p}")


def _check_N(N: int, name: str = "N"):
    if N < 4 or N > DESK_N_MAX:
        raise ValidationError(f"{name} must lie in [4, {DESK_N_MAX}], got {N}")


def _sequence_payload(seq: LacunarySequence) -> dict:
    return {"label": seq.label, "terms": seq.to_json(), "stats": sequence_stats(seq).to_dict()}


# ---------------------------------------------------------------------------
# Sequence commands (JSON to stdout, no files)
# ---------------------------------------------------------------------------
@command("construct", "build the near-ratio lacunary sequence")
def construct(config: RunConfig) -> Plan:
    if config.lam is None:
        raise ConfigError("construct needs --lambda")
    if config.seq_file:
        raise ConfigError("construct builds from --lambda; --seq-file does not apply")
    task, load = _sequence_source(config)

    def execute() -> Report:
        return Report("construct", stdout=_sequence_payload(load()))

    return Plan([task], execute)


@command("refine", "refine a sequence inside dyadic blocks")
def refine_command(config: RunConfig) -> Plan:
    task, load = _sequence_source(config)

    def execute() -> Report:
        seq = load()
        refined = refine(seq)
        return Report("refine", stdout={
            "original": _sequence_payload(seq),
            "refined": _sequence_payload(refined),
            "pieces_per_block": list(refinement_pieces(seq, refined)),
        })

    return Plan([task, "refine"], execute)


@command("sigma-example", "σ-block example sequences and their lacunary decomposition")
def sigma_example(config: RunConfig) -> Plan:
    sigmas = config.sigmas or [4]
    M = config.M or SIGMA_EXAMPLE_M
    for s in sigmas:
        if s < 2 or s > M:
            raise ValidationError(f"sigma must lie in [2, M={M}], got {s}")
    if M & (M - 1):
        raise ValidationError(f"M must be a power of two, got {M}")

    def execute() -> Report:
        examples = []
        for s in sigmas:
            seq = sigma_block_example(s, M)
            parts = decompose_into_lacunary(seq)
            examples.append({
                "sigma": s,
                "M": M,
                **_sequence_payload(seq),
                "parts": [p.to_json() for p in parts],
            })
        return Report("sigma-example", stdout={"examples": examples})

    return Plan([f"sigma-example sigma={s} M={M}" for s in sigmas], execute)


# ---------------------------------------------------------------------------
# Square functions
# ---------------------------------------------------------------------------
@command("square", "sample S(f) on the grid and report norms")
def square(config: RunConfig) -> Plan:
    task, load = _sequence_source(config)
    spec = _require_input(config)
    p = config.p if config.p is not None else 2.0
    _check_ps([p])
    jobs = resolve_jobs(config.jobs)

    def execute() -> Report:
        seq = load()
        f = parse_input(spec, config.base_seed)
        result = square_function(seq, f, oversampling=config.oversampling, jobs=jobs)
        M = result.grid_size
        f_samples = evaluate(f, M)
        S_p, f_p = result.lp_norm(p), lp_norm(f_samples, p)

        per_block = block_norms(seq, f, p, M)
        blocks = [
            [j, seq[j - 1] if j > 0 else 0, seq[j], l2, per_block[j]]
            for j, l2 in zip(result.blocks_used, result.per_block_l2.tolist())
        ]
        summary = {
            "sequence": _sequence_payload(seq),
            "input": spec,
            "p": p,
            "S_p": S_p,
            "f_p": f_p,
            "quotient": S_p / f_p if f_p > 0 else None,
            "l2_ratio": result.lp_norm(2) / lp_norm(f_samples, 2) if f_p > 0 else None,
            **result.summary(),
        }
        return Report(
            "square",
            columns=["x", "S"],
            rows=[list(r) for r in result.rows()],
            summary=summary,
            extra_tables={"blocks": (["j", "lo", "hi", "l2", "lp"], blocks)},
            plot=PlotSpec("x", "S", logscale=False, title=f"S(f), f = {spec}"),
        )

    return Plan([task, f"square input={spec} p={p}"], execute)


@command("square2d", "sample the product square function for f = g*h")
def square2d(config: RunConfig) -> Plan:
    task, load = _sequence_source(config)
    spec = _require_input(config)
    p = config.p if config.p is not None else 2.0
    _check_ps([p])
    jobs = resolve_jobs(config.jobs)

    def execute() -> Report:
        seq = load()
        parts = spec.split("*")
        g = parse_input(parts[0], config.base_seed)
        h = parse_input(parts[-1], config.base_seed)
        f = TrigPoly2D.outer(g, h)
        result = square_function_2d(seq, seq, f, oversampling=config.oversampling, jobs=jobs)
        shape = result.grid_size
        if shape[0] * shape[1] > 1_000_000:
            log.warning("square2d grid %dx%d: CSV will be large", *shape)

        xs, ys = np.meshgrid(grid_points(shape[0]), grid_points(shape[1]), indexing="ij")
        rows = np.column_stack([xs.ravel(), ys.ravel(), result.samples.values.ravel()]).tolist()
        f_samples = evaluate_2d(f, shape)
        S_p, f_p = result.lp_norm(p), lp_norm(f_samples, p)
        summary = {
            "sequence": _sequence_payload(seq),
            "input": spec,
            "p": p,
            "S_p": S_p,
            "f_p": f_p,
            "quotient": S_p / f_p if f_p > 0 else None,
            **result.summary(),
        }
        return Report("square2d", columns=["x", "y", "S"], rows=rows, summary=summary)

    return Plan([task, f"square2d input={spec} p={p}"], execute)


# ---------------------------------------------------------------------------
# Mikhlin constant of randomized smoothed sums
# ---------------------------------------------------------------------------
@command("mikhlin", "Mikhlin constant of randomized smoothed sums times (ρ-1)")
def mikhlin(config: RunConfig) -> Plan:
    if config.seq_file:
        seq = _load(config.seq_file)
        sequences = {ratio(seq): lambda: seq}
    else:
        lambdas = config.lambdas or MIKHLIN_LAMBDAS
        _check_lambdas(lambdas)
        if config.count < 3:
            raise ValidationError(f"count must be >= 3, got {config.count}")
        sequences = {lam: (lambda lam=lam: construct_near_ratio(lam, config.count)) for lam in lambdas}
    jobs = resolve_jobs(config.jobs)
    tasks = [f"mikhlin lambda={lam:g} trials={config.trials}" for lam in sequences]

    def execute() -> Report:
        built = {lam: load() for lam, load in sequences.items()}
        symbols = {}

        def measure(params: dict):
            seq = built[params["lambda"]]
            signs = SignVector.draw(usable_projections(seq, smoothed=True), params["seed"])
            symbol = randomized_sum(seq, signs, smoothed=True)
            if params["trial"] == 0:
                symbols[params["lambda"]] = symbol
            constant = mikhlin_constant(symbol)
            rho = ratio(seq)
            return {"rho": rho}, {
                "degenerate": float(symbol.degenerate),
                "mikhlin": constant,
                "product": constant * (rho - 1.0),
                "sup_norm": symbol.sup_norm,
            }

        points = [{"lambda": lam, "trial": t} for lam in built for t in range(config.trials)]
        records, notes = run_points("mikhlin", points, measure, config.base_seed, jobs)
        result = ScanResult("mikhlin", records, notes=notes)
        products = np.array([r.measured["product"] for r in records])
        result.checks["mikhlin_bound"] = verdict(bool(np.all(products <= envelopes.MIKHLIN_C0)))
        result.log_outcome()

        report = report_from_scan("mikhlin", result, PlotSpec("lambda", "product", logscale=False))
        report.summary["max_product"] = float(products.max())
        first = symbols[min(symbols)]
        report.extra_tables["symbol"] = (["n", "value"], [list(r) for r in first.rows()])
        return report

    return Plan(tasks, execute)


# ---------------------------------------------------------------------------
# Scans
# ---------------------------------------------------------------------------
def _scan_report(command_name: str, result: ScanResult, plot: PlotSpec | None) -> Report:
    result.log_outcome()
    return report_from_scan(command_name, result, plot)


@command("cardinality-scan", "#A_N with the exact pairing N = ⌈e^{4/(λ-1)}⌉")
def cardinality(config: RunConfig) -> Plan:
    lambdas = config.lambdas or CARDINALITY_LAMBDAS
    _check_lambdas(lambdas)
    jobs = resolve_jobs(config.jobs)
    coarse = config.lambdas is None

    def execute() -> Report:
        result = cardinality_scan(lambdas, config.base_seed, jobs)
        if coarse:
            counts = [cardinality_count(lam)[0] for lam in COARSE_LAMBDAS]
            result.checks["nonempty_coarse_grid"] = verdict(min(counts) >= 1)
        return _scan_report("cardinality-scan", result, PlotSpec("lambda", "count"))

    tasks = [f"cardinality lambda={lam:g}" for lam in lambdas]
    if coarse:
        tasks.append(f"nonempty check over {COARSE_LAMBDAS}")
    return Plan(tasks, execute)


@command("sharpness-scan", "H^p lower-bound functional on f_N (or --pichorides)")
def sharpness(config: RunConfig) -> Plan:
    jobs = resolve_jobs(config.jobs)
    if config.pichorides:
        ps = config.ps or PICHORIDES_PS
        for p in ps:
            if not 1 < p < 2:
                raise ValidationError(f"p must lie in (1, 2), got {p}")

        def execute_pichorides() -> Report:
            result = pichorides_scan(ps, config.oversampling, config.base_seed, jobs)
            return _scan_report("sharpness-scan", result, PlotSpec("lambda", "functional"))

        return Plan([f"pichorides p={p:g}" for p in ps], execute_pichorides)

    lambdas = config.lambdas or DESK_LAMBDAS
    Ns = config.Ns or DESK_NS
    _check_lambdas([*lambdas, config.fit_lambda])
    for N in Ns:
        _check_N(N)

    def execute() -> Report:
        result = sharpness_scan(
            lambdas, Ns, config.fit_lambda, config.oversampling, config.base_seed, jobs,
        )
        return _scan_report("sharpness-scan", result, PlotSpec("lambda", "functional"))

    tasks = [f"sharpness lambda={lam:g} N={max(Ns)}" for lam in lambdas]
    tasks += [f"sharpness lambda={config.fit_lambda:g} N={N}" for N in Ns if N != max(Ns)]
    return Plan(tasks, execute)


@command("sigma-scan", "σ-block functional on f_M")
def sigma_command(config: RunConfig) -> Plan:
    sigmas = config.sigmas or SIGMAS
    M = config.M or SIGMA_M
    if M & (M - 1):
        raise ValidationError(f"M must be a power of two, got {M}")
    for s in sigmas:
        if s < 2 or s > M // 4:
            raise ValidationError(f"sigma must lie in [2, M/4 = {M // 4}], got {s}")
    jobs = resolve_jobs(config.jobs)

    def execute() -> Report:
        result = sigma_scan(sigmas, M, config.oversampling, config.base_seed, jobs)
        return _scan_report("sigma-scan", result, PlotSpec("sigma", "functional"))

    return Plan([f"sigma-block sigma={s} M={M}" for s in sigmas], execute)


@command("paley-scan", "Paley quotient on f_N (--two-d adds the product case)")
def paley(config: RunConfig) -> Plan:
    lambdas = config.lambdas or DESK_LAMBDAS
    N = config.N or DEFAULT_N
    _check_lambdas(lambdas)
    _check_N(N)
    if config.two_d:
        _check_N(config.N_2d, "N_2d")
    jobs = resolve_jobs(config.jobs)

    def execute() -> Report:
        result = paley_scan(
            lambdas, N, config.two_d, config.N_2d, config.oversampling, config.base_seed, jobs,
        )
        return _scan_report("paley-scan", result, PlotSpec("lambda", "quotient"))

    suffix = f" (2-D at N={config.N_2d})" if config.two_d else ""
    return Plan([f"paley lambda={lam:g} N={N}{suffix}" for lam in lambdas], execute)


@command("zygmund", "Zygmund inequality on σ-block sequences")
def zygmund(config: RunConfig) -> Plan:
    sigmas = config.sigmas or ZYGMUND_SIGMAS
    M = config.M or ZYGMUND_M
    if M & (M - 1):
        raise ValidationError(f"M must be a power of two, got {M}")
    for s in sigmas:
        if s < 2 or s > M:
            raise ValidationError(f"sigma must lie in [2, M={M}], got {s}")
    jobs = resolve_jobs(config.jobs)

    def execute() -> Report:
        result = zygmund_scan(sigmas, M, config.trials, config.oversampling, config.base_seed, jobs)
        return _scan_report("zygmund", result, PlotSpec("sigma", "quotient"))

    return Plan([f"zygmund sigma={s} M={M} trials={config.trials}" for s in sigmas], execute)


def _corpus(config: RunConfig, defaults: Callable[[], list[LacunarySequence]]):
    if config.seq_file:
        seq = _load(config.seq_file)
        return [seq.label], lambda: [seq]
    return None, defaults


def _lambda_p_defaults() -> list[LacunarySequence]:
    dyadic = LacunarySequence(tuple(2 ** k for k in range(11)), label="dyadic")
    return [dyadic, sigma_block_example(16, 256)]


@command("lambda-p", "Λ(p) constants of lacunary sets")
def lambda_p(config: RunConfig) -> Plan:
    ps = config.ps or LAMBDA_P_PS
    _check_ps(ps, lo=2.0)
    labels, load = _corpus(config, _lambda_p_defaults)
    labels = labels or ["dyadic", "sigma-block sigma=16 M=256"]
    jobs = resolve_jobs(config.jobs)

    def execute() -> Report:
        result = lambda_p_scan(load(), ps, config.trials, config.oversampling, config.base_seed, jobs)
        return _scan_report("lambda-p", result, PlotSpec("p", "max_quotient"))

    return Plan([f"lambda-p {label} p={p:g}" for label in labels for p in ps], execute)


@command("weak-type", "weak-type and L log^{1/2} L ratios on f_N")
def weak_type(config: RunConfig) -> Plan:
    lambdas = config.lambdas or DESK_LAMBDAS
    N = config.N or DEFAULT_N
    _check_lambdas(lambdas)
    _check_N(N)
    jobs = resolve_jobs(config.jobs)

    def execute() -> Report:
        result = weak_type_scan(lambdas, N, config.oversampling, config.base_seed, jobs)
        return _scan_report("weak-type", result, PlotSpec("lambda", "ratio_h1"))

    return Plan([f"weak-type lambda={lam:g} N={N}" for lam in lambdas], execute)


def _dual_defaults(width: int) -> Callable[[], list[LacunarySequence]]:
    def build():
        dyadic = LacunarySequence(tuple(2 ** k for k in range(width.bit_length() + 1)), label="dyadic")
        return [dyadic, rescale_near_ratio(1.1, 8, width + 1)]
    return build


@command("dual-scan", "S(f) against f in L^p for p > 2")
def dual(config: RunConfig) -> Plan:
    ps = config.ps or DUAL_PS
    if any(not p > 2 for p in ps):
        raise ValidationError(f"dual range needs p > 2, got {ps}")
    labels, load = _corpus(config, _dual_defaults(config.width))
    labels = labels or ["dyadic", "near-ratio lambda=1.1"]
    jobs = resolve_jobs(config.jobs)

    def execute() -> Report:
        result = dual_range_scan(load(), ps, config.trials, config.width, config.base_seed, jobs)
        return _scan_report("dual-scan", result, PlotSpec("p", "max_ratio"))

    return Plan(
        [f"dual {label} p={p:g} trials={config.trials} width={config.width}" for label in labels for p in ps],
        execute,
    )


@command("khintchine", "Khintchine bracket for randomized sums")
def khintchine(config: RunConfig) -> Plan:
    ps = config.ps or KHINTCHINE_PS
    _check_ps(ps, lo=1.0, hi=2.0)
    if config.seq_file:
        seq = _load(config.seq_file)
        label, load = seq.label, lambda: seq
    else:
        label, load = "near-ratio lambda=1.1", lambda: rescale_near_ratio(1.1, 16, 256)
    jobs = resolve_jobs(config.jobs)

    def execute() -> Report:
        result = khintchine_scan(
            load(), ps, config.trials, config.draws, config.oversampling, config.base_seed, jobs,
        )
        return _scan_report("khintchine", result, PlotSpec("p", "ratio_mean", logscale=False))

    return Plan(
        [f"khintchine {label} p={p:g} trials={config.trials} draws={config.draws}" for p in ps],
        execute,
    )
