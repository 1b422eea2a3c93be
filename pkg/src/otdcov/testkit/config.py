"""Test configuration and report records."""
import hashlib
import json
from dataclasses import asdict, dataclass, field

from ..ranks_rd import ScoreSpec
from ..ranks_sphere import CHARTS

SPACES = ("euclidean", "sphere")
VARIANTS = ("two_step", "step1_only")

_VARIANT_ALIASES = {"two_step": "two_step", "two-step": "two_step",
                    "step1_only": "step1_only", "step1": "step1_only", "step1-only": "step1_only"}


def _digest(obj):
    text = json.dumps(obj, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


@dataclass(frozen=True)
class TestConfig:
    """Everything that determines a test's statistic and null law.

    Scores are given by name (see :meth:`otdcov.ranks_rd.ScoreSpec.parse`).
    On the sphere, ``chart`` selects a chart embedding of the transported
    points instead of the rank/sign tangent embedding; with
    ``variant="step1_only"`` a chart is always used (azimuthal equidistant
    by default).  ``seed`` fixes every grid and the null draws.
    """
    __test__ = False  # not a pytest class

    space: str = "euclidean"
    scores_x: str = "wilcoxon"
    scores_y: str = "wilcoxon"
    chart: str | None = None
    variant: str = "two_step"
    n_null_draws: int = 999
    alpha: float = 0.05
    seed: int = 0
    biloop_c: float = 1.0

    def __post_init__(self):
        if self.space not in SPACES:
            raise ValueError(f"space must be one of {SPACES}, got {self.space!r}")
        variant = _VARIANT_ALIASES.get(self.variant)
        if variant is None:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        object.__setattr__(self, "variant", variant)
        for name in ("scores_x", "scores_y"):
            spec = ScoreSpec.parse(getattr(self, name), c=self.biloop_c)
            object.__setattr__(self, name, spec.kind if spec.kind != "biloop" else f"biloop-{spec.base}")
        if self.chart is not None and self.chart not in CHARTS:
            raise ValueError(f"chart must be one of {CHARTS}, got {self.chart!r}")
        if self.chart is not None and self.space != "sphere":
            raise ValueError("charts only apply to spherical data")
        if int(self.n_null_draws) != self.n_null_draws or self.n_null_draws < 99:
            raise ValueError("n_null_draws must be an integer >= 99")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        if int(self.seed) != self.seed or self.seed < 0:
            raise ValueError("seed must be a nonnegative integer")
        if not self.biloop_c > 0:
            raise ValueError("biloop_c must be positive")

    @property
    def score_x(self):
        return ScoreSpec.parse(self.scores_x, c=self.biloop_c)

    @property
    def score_y(self):
        return ScoreSpec.parse(self.scores_y, c=self.biloop_c)

    @property
    def effective_chart(self):
        if self.space == "sphere" and self.variant == "step1_only" and self.chart is None:
            return "azimuthal_equidistant"
        return self.chart

    def to_dict(self):
        return asdict(self)

    def fingerprint(self):
        """Short hash that changes whenever any field changes."""
        return _digest(self.to_dict())

    def null_key(self, n, d1, d2):
        """Hash of everything the grid-based null law depends on."""
        key = {"n": int(n), "d1": int(d1), "d2": int(d2), "space": self.space,
               "scores_x": self.scores_x, "scores_y": self.scores_y,
               "chart": self.effective_chart, "variant": self.variant,
               "biloop_c": self.biloop_c, "seed": self.seed, "draws": self.n_null_draws}
        return _digest(key)


@dataclass
class TestReport:
    """Outcome of one test.

    ``reject`` is ``p_value <= alpha``, which is equivalent to
    ``statistic > critical_value``.
    """
    __test__ = False

    statistic: float
    p_value: float
    critical_value: float
    n: int
    alpha: float
    config: dict
    fingerprint: str
    seed: int
    n_null_draws: int
    reject: bool
    flags: list = field(default_factory=list)

    def to_dict(self):
        return asdict(self)
