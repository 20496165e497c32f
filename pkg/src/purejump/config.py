"""Run configuration: ``key = value`` files with CLI-flag overrides.

Every field has a default except the seed, which the simulate and mc-table
commands require.  Unknown keys, malformed numbers and violated invariants
are reported with the offending line number and exit code 2.
"""

from dataclasses import dataclass, fields

from .errors import ConfigError

# Paper-calibrated defaults for the model block.
_DEFAULTS = {
    "mu": 1.419188e-6,
    "lam": 128.2085,
    "sigma_e": 0.0007289,
    "c": 1.0,
    "d": 0.35,
    "t_days": 2620,
    "steps_per_day": 50,
    "days_per_month": 20,
    "duration_pool": 0,
    "kappa": 0.3,
    "theta": 0.25,
    "alpha": 0.05,
    "bootstrap_reps": 1000,
    "reps": 300,
    "bandwidth_exponent": 0.5,
    "threads": 0,
}

# Accepted spellings in config files (M = grid steps per day, m = trading
# days per month, as in the simulation conventions).
_ALIASES = {"lambda": "lam", "M": "steps_per_day", "m": "days_per_month"}

_INT_FIELDS = {"t_days", "steps_per_day", "days_per_month", "duration_pool",
               "bootstrap_reps", "reps", "threads", "seed"}


@dataclass
class RunConfig:
    mu: float = _DEFAULTS["mu"]
    lam: float = _DEFAULTS["lam"]
    sigma_e: float = _DEFAULTS["sigma_e"]
    c: float = _DEFAULTS["c"]
    d: float = _DEFAULTS["d"]
    t_days: int = _DEFAULTS["t_days"]
    steps_per_day: int = _DEFAULTS["steps_per_day"]
    days_per_month: int = _DEFAULTS["days_per_month"]
    duration_pool: int = _DEFAULTS["duration_pool"]
    kappa: float = _DEFAULTS["kappa"]
    theta: float = _DEFAULTS["theta"]
    alpha: float = _DEFAULTS["alpha"]
    bootstrap_reps: int = _DEFAULTS["bootstrap_reps"]
    reps: int = _DEFAULTS["reps"]
    bandwidth_exponent: float = _DEFAULTS["bandwidth_exponent"]
    threads: int = _DEFAULTS["threads"]
    seed: int | None = None

    def validate(self):
        checks = [
            (self.lam > 0, "lambda must be positive"),
            (self.sigma_e >= 0, "sigma_e must be nonnegative"),
            (self.c > 0, "c must be positive"),
            (0.0 <= self.d < 0.5, "d must be in [0, 1/2)"),
            (self.t_days >= 1, "t_days must be >= 1"),
            (self.steps_per_day >= 1, "steps_per_day must be >= 1"),
            (self.days_per_month >= 1, "days_per_month must be >= 1"),
            (self.duration_pool >= 0, "duration_pool must be >= 0"),
            (0.0 < self.kappa < 1.0, "kappa must be in (0, 1)"),
            (0.0 < self.theta < 1.0, "theta must be in (0, 1)"),
            (0.0 < self.alpha < 1.0, "alpha must be in (0, 1)"),
            (self.bootstrap_reps >= 1, "bootstrap_reps must be >= 1"),
            (self.reps >= 1, "reps must be >= 1"),
            (0.0 < self.bandwidth_exponent < 1.0, "bandwidth_exponent must be in (0, 1)"),
            (self.threads >= 0, "threads must be >= 0"),
        ]
        for ok, message in checks:
            if not ok:
                raise ConfigError(message)
        return self

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


_FIELD_NAMES = {f.name for f in fields(RunConfig)}


def parse_config(text: str) -> RunConfig:
    """Parse ``key = value`` lines (``#`` comments) into a validated config."""
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = (part.strip() for part in line.partition("="))
        key = _ALIASES.get(key, key)
        if key not in _FIELD_NAMES:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        try:
            values[key] = int(value) if key in _INT_FIELDS else float(value)
        except ValueError:
            raise ConfigError(f"line {lineno}: could not parse number {value!r} for {key!r}")
    try:
        return RunConfig(**values).validate()
    except ConfigError as exc:
        raise ConfigError(f"invalid configuration: {exc}") from None


def load_config(path: str | None) -> RunConfig:
    if path is None:
        return RunConfig()
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return parse_config(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
