"""Fit the three location-model families to a synthetic county dataset.

Draws a county-style table from a zero-inflated Poisson process whose
covariate names match the bundled report blocks, fits logit, Poisson, and
ZIP by maximum likelihood, and prints the coefficient tables.  Along the
way it shows why the plain Poisson is a poor fit for zero-inflated data:
the sample variance exceeds the fitted mean.
"""

import numpy as np

from geocount import (
    Bernoulli,
    DgpSpec,
    ModelSpec,
    Normal,
    UniformSquare,
    fit,
    generate,
)
from geocount.cli import render_fit_text

COVARIATES = (
    ("banks_per_10k", Normal(0.0, 1.0)),
    ("poverty_rate", Normal(0.0, 1.0)),
    ("metro", Bernoulli(0.35)),
    ("labor_unions_per_10k", Normal(0.0, 1.0)),
)

# count component: fewer credit unions where banks are dense, more near unions
BETA = (0.40, -0.30, -0.15, 0.25, 0.35)
# inflation component: structural zeros concentrate in non-metro counties
GAMMA = (-0.60, 0.20, 0.10, -0.50, -0.20)

spec = DgpSpec(
    n=3000,
    covariates=COVARIATES,
    beta=BETA,
    gamma=GAMMA,
    layout=UniformSquare(side_km=4000.0),
    seed=2024,
)

dataset = generate(spec)
counts = dataset.counts()
print(f"simulated {len(dataset)} counties")
print(f"zero share: {np.mean(counts == 0):.3f}   mean count: {counts.mean():.3f}")
print(f"sample variance: {counts.var(ddof=1):.3f}  (> mean: over-dispersed)\n")

names = tuple(name for name, _ in COVARIATES)
for family in ("logit", "poisson", "zip"):
    model = ModelSpec(family=family, count_covariates=names)
    result = fit(model, dataset)
    print("=" * 64)
    print(render_fit_text(result))

print("=" * 64)
print("Note how the ZIP count coefficients land near the generating values")
print(f"beta = {BETA}, while the Poisson absorbs the structural zeros into")
print("attenuated coefficients and the logit only sees presence/absence.")
