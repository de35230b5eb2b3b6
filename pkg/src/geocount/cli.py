"""Command-line interface: fit, hotspot, simulate, report.

Exit codes: 0 success, 1 on any domain or I/O error (reported as a single
``Code: message`` line on stderr), 2 when a fit ran but did not converge
(the result is still written).  stdout carries only the report or summary;
diagnostics go to stderr.

Flag values override config-file values, which override defaults; the
optional ``--config`` JSON file mirrors :class:`RunConfig` field names.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from dataclasses import dataclass

import numpy as np

from .data import Dataset
from .exceptions import GeocountError, InvalidSpec
from .fitting import FitResult, fit
from .ingest import IngestConfig, read_dataset, write_dataset
from .likelihoods import Family, ModelSpec
from .simulate import dgp_spec_from_json, generate
from .spatial import DistanceBand, HotspotResult, KNearest, build_weights, getis_ord_gstar

#: Table-style block headings for known covariate names in text reports.
COVARIATE_BLOCKS: tuple[tuple[str, tuple[str, ...]], ...] = (
    (
        "Market Concentration",
        (
            "metro",
            "nonmetro_adjacent",
            "population_density",
            "banks_per_10k",
            "savings_loans_per_10k",
        ),
    ),
    (
        "Socio-Demographic",
        (
            "pct_african_american",
            "pct_hispanic",
            "pct_bachelors",
            "pct_foreign_born",
            "poverty_rate",
        ),
    ),
    (
        "Economic",
        (
            "pct_change_households",
            "pct_owner_occupied",
            "unemployment_rate",
            "pop_employment_ratio",
            "pop_proprietorship_ratio",
        ),
    ),
    (
        "Organizations of Common Bond",
        (
            "coops_present",
            "civil_social_per_10k",
            "business_assoc_per_10k",
            "professional_assoc_per_10k",
            "labor_unions_per_10k",
        ),
    ),
)

_STAR_LEGEND = (
    "***: Significant at or above the 99.9% level.\n"
    "**: Significant at the 95.0% level.\n"
    "*: Significant at the 90.0% level.\n"
)

_INFLATE_PREFIX = "inflate:"


@dataclass
class RunConfig:
    """Resolved options for one command invocation."""

    command: str
    input: str | None = None
    output: str | None = None
    family: str | None = None
    covariates: tuple[str, ...] = ()
    inflation_covariates: tuple[str, ...] = ()
    band_km: float | None = None
    k: int | None = None
    value_column: str = "count"
    standardize: bool = False
    seed: int | None = None
    format: str | None = None

    def require(self, *fields):
        for name in fields:
            if getattr(self, name) in (None, ""):
                raise InvalidSpec(f"{self.command}: required option {name!r} is missing")


# ---------------------------------------------------------------------------
# rendering


def _format_p(p: float) -> str:
    # display floor at 0.0001; exact values live in the JSON output
    return f"({max(p, 0.0001):.4f})"


def render_fit_text(result: FitResult) -> str:
    """Coefficient table with block headings for recognized covariate names."""
    count_rows = [r for r in result.coefficients if not r.name.startswith(_INFLATE_PREFIX)]
    inflate_rows = [r for r in result.coefficients if r.name.startswith(_INFLATE_PREFIX)]

    by_name = {r.name: r for r in count_rows}
    ordered: list[tuple[str | None, list]] = []
    placed = set()
    intercept = [by_name["Intercept"]] if "Intercept" in by_name else []
    placed.update(r.name for r in intercept)
    blocks = []
    for heading, names in COVARIATE_BLOCKS:
        hit = [by_name[n] for n in names if n in by_name]
        if hit:
            blocks.append((heading, hit))
            placed.update(r.name for r in hit)
    rest = [r for r in count_rows if r.name not in placed]
    if blocks:
        ordered = [(None, intercept + rest)] + blocks
    else:
        ordered = [(None, intercept + rest)]
    if inflate_rows:
        stripped = [r._replace(name=r.name[len(_INFLATE_PREFIX):]) for r in inflate_rows]
        ordered.append(("Zero-Inflation Component", stripped))

    width = max(
        [len("Variable")]
        + [len(r.name) for _, rows in ordered for r in rows]
        + [len(h) for h, _ in ordered if h]
    )
    lines = [
        f"Family: {result.family.value}",
        f"Log-likelihood: {result.log_likelihood:.6f}",
        f"Iterations: {result.iterations}   Converged: {'yes' if result.converged else 'no'}",
        "",
        f"{'Variable':<{width}}  {'Estimate':>10}  {'Stars':<5}  (p-value)",
    ]
    for heading, rows in ordered:
        if heading:
            lines.append(heading)
        for r in rows:
            indent = "  " if heading else ""
            name = f"{indent}{r.name}"
            lines.append(
                f"{name:<{width}}  {r.estimate:>10.4f}  {r.stars:<5}  {_format_p(r.p_value)}"
            )
    lines.append("")
    lines.append(_STAR_LEGEND.rstrip("\n"))
    return "\n".join(lines) + "\n"


def render_fit_csv(result: FitResult) -> str:
    lines = ["name,estimate,std_error,z_stat,p_value,stars"]
    for r in result.coefficients:
        lines.append(
            f"{r.name},{r.estimate!r},{r.std_error!r},{r.z_stat!r},{r.p_value!r},{r.stars}"
        )
    return "\n".join(lines) + "\n"


def render_fit_json(result: FitResult) -> str:
    return json.dumps(result.to_dict(), indent=2) + "\n"


def render_hotspot_csv(dataset: Dataset, result: HotspotResult) -> str:
    lines = ["id,z,class"]
    for obs, z, cls in zip(dataset.observations, result.z, result.classes):
        lines.append(f"{obs.id},{float(z)!r},{cls.value}")
    return "\n".join(lines) + "\n"


def render_hotspot_geojson(dataset: Dataset, result: HotspotResult) -> str:
    features = []
    for obs, z, cls in zip(dataset.observations, result.z, result.classes):
        lat, lon = obs.centroid
        features.append(
            {
                "type": "Feature",
                "geometry": {"type": "Point", "coordinates": [lon, lat]},
                "properties": {"id": obs.id, "z": float(z), "class": cls.value},
            }
        )
    doc = {"type": "FeatureCollection", "features": features}
    return json.dumps(doc, indent=2) + "\n"


# ---------------------------------------------------------------------------
# commands


def cmd_fit(config: RunConfig) -> int:
    config.require("input", "output", "family")
    ingest_config = IngestConfig(standardize=config.standardize)
    dataset = read_dataset(config.input, ingest_config)
    model = ModelSpec(
        family=Family(config.family),
        count_covariates=config.covariates,
        inflation_covariates=config.inflation_covariates,
        add_intercept=True,
    )
    result = fit(model, dataset)
    fmt = config.format or "text"
    if fmt == "text":
        rendered = render_fit_text(result)
    elif fmt == "csv":
        rendered = render_fit_csv(result)
    elif fmt == "json":
        rendered = render_fit_json(result)
    else:
        raise InvalidSpec(f"fit: unknown format {fmt!r}")
    with open(config.output, "w", encoding="utf-8") as handle:
        handle.write(rendered)
    print(
        f"fit {result.family.value}: converged={'yes' if result.converged else 'no'} "
        f"loglik={result.log_likelihood:.6f} -> {config.output}"
    )
    if not result.converged:
        print("fit did not converge within the iteration budget", file=sys.stderr)
        return 2
    return 0


def cmd_hotspot(config: RunConfig) -> int:
    config.require("input", "output")
    if config.band_km is None and config.k is None:
        raise InvalidSpec("hotspot: a weights scheme (band:KM or knn:K) is required")
    dataset = read_dataset(config.input, IngestConfig())
    if config.value_column == "count":
        values = dataset.counts().astype(float)
    else:
        values = dataset.covariate_values(config.value_column)
    scheme = DistanceBand(config.band_km) if config.band_km is not None else KNearest(config.k)
    weights = build_weights(dataset.centroids(), scheme)
    result = getis_ord_gstar(values, weights)
    fmt = config.format or "csv"
    if fmt == "csv":
        rendered = render_hotspot_csv(dataset, result)
    elif fmt == "geojson":
        rendered = render_hotspot_geojson(dataset, result)
    else:
        raise InvalidSpec(f"hotspot: unknown format {fmt!r}")
    with open(config.output, "w", encoding="utf-8") as handle:
        handle.write(rendered)
    n_hot = sum(1 for c in result.classes if c.value.startswith("Hot"))
    n_cold = sum(1 for c in result.classes if c.value.startswith("Cold"))
    print(f"hotspot: n={weights.n} hot={n_hot} cold={n_cold} -> {config.output}")
    return 0


def cmd_simulate(config: RunConfig) -> int:
    config.require("input", "output")
    with open(config.input, "r", encoding="utf-8") as handle:
        spec = dgp_spec_from_json(handle.read())
    if config.seed is not None:
        spec = dataclasses.replace(spec, seed=config.seed)
    dataset = generate(spec)
    write_dataset(dataset, config.output)
    counts = dataset.counts()
    zero_share = float(np.mean(counts == 0))
    print(f"simulate: n={len(dataset)} zero_share={zero_share:.4f} mean_count={counts.mean():.4f}")
    return 0


def cmd_report(config: RunConfig) -> int:
    config.require("input")
    with open(config.input, "r", encoding="utf-8") as handle:
        payload = json.load(handle)
    try:
        result = FitResult.from_dict(payload)
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidSpec(f"report: not a fit result document: {exc}") from exc
    sys.stdout.write(render_fit_text(result))
    return 0


# ---------------------------------------------------------------------------
# argument parsing and config-file merge


def _parse_weights(text: str) -> tuple[float | None, int | None]:
    kind, _, value = text.partition(":")
    try:
        if kind == "band":
            return float(value), None
        if kind == "knn":
            return None, int(value)
    except ValueError:
        pass
    raise InvalidSpec(f"bad weights scheme {text!r}; expected band:KM or knn:K")


def _split_names(text: str | None) -> tuple[str, ...]:
    if not text:
        return ()
    return tuple(s.strip() for s in text.split(",") if s.strip())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="geocount",
        description="Count-data location models and hot-spot analysis for geo-tagged counties.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_fit = sub.add_parser("fit", help="fit a logit, Poisson, or ZIP model to a CSV table")
    p_fit.add_argument("--input", help="input dataset CSV")
    p_fit.add_argument("--family", choices=[f.value for f in Family])
    p_fit.add_argument("--covariates", help="comma-separated covariate names")
    p_fit.add_argument("--inflation-covariates", help="ZIP inflation covariates")
    p_fit.add_argument(
        "--standardize", action=argparse.BooleanOptionalAction, default=None
    )
    p_fit.add_argument("--out", help="output path for the coefficient table")
    p_fit.add_argument("--format", choices=["text", "csv", "json"])
    p_fit.add_argument("--config", help="JSON config file mirroring RunConfig fields")

    p_hot = sub.add_parser("hotspot", help="Getis-Ord hot/cold-spot z-scores")
    p_hot.add_argument("--input", help="input dataset CSV")
    p_hot.add_argument("--value-column", dest="value_column")
    p_hot.add_argument("--weights", help="band:KM or knn:K")
    p_hot.add_argument("--out")
    p_hot.add_argument("--format", choices=["csv", "geojson"])
    p_hot.add_argument("--config")

    p_sim = sub.add_parser("simulate", help="draw a synthetic dataset from a DGP spec")
    p_sim.add_argument("--spec", help="DgpSpec JSON document")
    p_sim.add_argument("--out", help="output dataset CSV")
    p_sim.add_argument("--seed", type=int)
    p_sim.add_argument("--config")

    p_rep = sub.add_parser("report", help="render a saved fit result")
    p_rep.add_argument("--fit", help="fit result JSON produced by fit --format json")
    p_rep.add_argument("--format", choices=["text"])
    p_rep.add_argument("--config")

    return parser


def _load_config_file(path: str | None) -> dict:
    if not path:
        return {}
    with open(path, "r", encoding="utf-8") as handle:
        doc = json.load(handle)
    if not isinstance(doc, dict):
        raise InvalidSpec("config file must be a JSON object")
    return doc


def _resolve(args: argparse.Namespace) -> RunConfig:
    file_values = _load_config_file(getattr(args, "config", None))

    def pick(flag_value, key, default=None):
        if flag_value is not None:
            return flag_value
        if key in file_values and file_values[key] is not None:
            return file_values[key]
        return default

    command = args.command
    band_km, k = None, None
    weights_text = pick(getattr(args, "weights", None), "weights")
    if weights_text is not None:
        band_km, k = _parse_weights(weights_text)
    band_km = pick(band_km, "band_km")
    k = pick(k, "k")

    input_path = pick(
        getattr(args, "input", None) or getattr(args, "spec", None) or getattr(args, "fit", None),
        "input",
    )
    covariates = getattr(args, "covariates", None)
    if covariates is not None:
        covariates = _split_names(covariates)
    file_cov = file_values.get("covariates")
    if covariates is None and file_cov is not None:
        covariates = tuple(file_cov)
    inflation = getattr(args, "inflation_covariates", None)
    if inflation is not None:
        inflation = _split_names(inflation)
    file_inf = file_values.get("inflation_covariates")
    if inflation is None and file_inf is not None:
        inflation = tuple(file_inf)

    return RunConfig(
        command=command,
        input=input_path,
        output=pick(getattr(args, "out", None), "output"),
        family=pick(getattr(args, "family", None), "family"),
        covariates=covariates or (),
        inflation_covariates=inflation or (),
        band_km=float(band_km) if band_km is not None else None,
        k=int(k) if k is not None else None,
        value_column=pick(getattr(args, "value_column", None), "value_column", "count"),
        standardize=bool(pick(getattr(args, "standardize", None), "standardize", False)),
        seed=pick(getattr(args, "seed", None), "seed"),
        format=pick(getattr(args, "format", None), "format"),
    )


_COMMANDS = {
    "fit": cmd_fit,
    "hotspot": cmd_hotspot,
    "simulate": cmd_simulate,
    "report": cmd_report,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _resolve(args)
        return _COMMANDS[config.command](config)
    except GeocountError as exc:
        print(f"{exc.code}: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"IOError: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"IOError: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
