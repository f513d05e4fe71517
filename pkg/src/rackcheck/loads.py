"""Equivalent lateral force calculation and load assembly.

Seismic weights come from the adjusted per-level loads (lb -> kip), the base
shear is Cs * W with Cs = Sa * Mv * IE / (Rd*Ro), and the shear is
distributed over the levels in proportion to W_i * h_i. The distribution is
an exact partition: the level forces sum to the base shear to float
precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import DegenerateDistribution, InputError
from .retrieval import SeismicParameters

FT_PER_M = 3.280839895013123  # 1 m = 3.2808... ft

ANCHOR_PERIODS = (0.2, 0.5, 1.0, 2.0)  # s, spectrum anchor points


@dataclass(frozen=True)
class ElfConfig:
    """Knobs of the lateral force procedure.

    rd_ro is the combined ductility/overstrength divisor; importance and mv
    scale the spectral ordinate. period_rule picks the spectral ordinate:
    "plateau" always uses Sa(0.2), "formula" estimates the period from the
    rack height and interpolates the spectrum. live_factor/seismic_factor are
    the default load-combination factors downstream.
    """

    rd_ro: float = 2.7
    importance: float = 1.0
    mv: float = 1.0
    period_rule: str = "plateau"
    live_factor: float = 1.5
    seismic_factor: float = 1.0


@dataclass(frozen=True)
class SeismicLoadResult:
    elevations_ft: list[float]
    forces_kip: list[float]
    base_shear_kip: float
    cs: float
    weights_kip: list[float]
    sa_used: float
    period_s: float | None = None


@dataclass(frozen=True)
class LoadData:
    """Per-level lateral (seismic) and vertical (live) point loads in kip."""

    seismic: list[tuple[float, float]]   # (elevation ft, force kip)
    live: list[tuple[float, float]]
    base_shear_kip: float = 0.0

    def to_document(self) -> dict:
        return {
            "seismic": [{"elevation_ft": e, "force_kip": f} for e, f in self.seismic],
            "live": [{"elevation_ft": e, "force_kip": f} for e, f in self.live],
            "base_shear_kip": self.base_shear_kip,
        }

    @classmethod
    def from_document(cls, doc: dict) -> "LoadData":
        return cls(
            seismic=[(d["elevation_ft"], d["force_kip"]) for d in doc["seismic"]],
            live=[(d["elevation_ft"], d["force_kip"]) for d in doc["live"]],
            base_shear_kip=doc.get("base_shear_kip", 0.0),
        )


def estimate_period(height_ft: float) -> float:
    """Empirical fundamental period Ta = 0.05 * h^0.75 with h in metres."""
    h_m = height_ft / FT_PER_M
    return 0.05 * h_m ** 0.75


def design_spectral_acceleration(params: SeismicParameters, config: ElfConfig,
                                 height_ft: float | None = None) -> tuple[float, float | None]:
    """Spectral ordinate for the lateral force calc, plus the period used
    (None under the plateau rule).

    The formula rule clamps to the 0.2 s plateau below 0.2 s and to the
    2.0 s ordinate above, interpolating Sa linearly against ln(T) between
    anchors.
    """
    if config.period_rule == "plateau":
        return params.Sa_02, None
    if config.period_rule != "formula":
        raise InputError(f"unknown period rule {config.period_rule!r}")
    if height_ft is None or height_ft <= 0:
        raise InputError("formula period rule needs a positive height")
    t = estimate_period(height_ft)
    ordinates = (params.Sa_02, params.Sa_05, params.Sa_10, params.Sa_20)
    if t <= ANCHOR_PERIODS[0]:
        return ordinates[0], t
    if t >= ANCHOR_PERIODS[-1]:
        return ordinates[-1], t
    for i in range(len(ANCHOR_PERIODS) - 1):
        t0, t1 = ANCHOR_PERIODS[i], ANCHOR_PERIODS[i + 1]
        if t0 <= t <= t1:
            w = (math.log(t) - math.log(t0)) / (math.log(t1) - math.log(t0))
            return ordinates[i] + w * (ordinates[i + 1] - ordinates[i]), t
    raise InputError(f"period {t} outside spectrum")  # unreachable


def calculate_seismic_loads(elevations_ft: list[float], loads_lbs: list[float],
                            params: SeismicParameters,
                            config: ElfConfig = ElfConfig()) -> SeismicLoadResult:
    """Distribute the base shear over the load levels.

    W_i = loads_lbs[i] / 1000 (kip); V = Cs * sum(W);
    F_i = V * W_i h_i / sum(W_j h_j).
    """
    if not elevations_ft or len(elevations_ft) != len(loads_lbs):
        raise InputError("elevations and loads must be non-empty and aligned")
    for a, b in zip(elevations_ft, elevations_ft[1:]):
        if b <= a:
            raise InputError(f"elevations must strictly increase ({a} then {b})")
    if any(w < 0 for w in loads_lbs):
        raise InputError("negative level load")

    weights = [w / 1000.0 for w in loads_lbs]  # lb -> kip
    sa, period = design_spectral_acceleration(params, config,
                                              height_ft=elevations_ft[-1])
    cs = sa * config.mv * config.importance / config.rd_ro
    total_w = math.fsum(weights)
    base_shear = cs * total_w

    wh = [w * h for w, h in zip(weights, elevations_ft)]
    sum_wh = math.fsum(wh)
    if sum_wh == 0.0:
        raise DegenerateDistribution("sum of weight*height is zero")
    forces = [base_shear * x / sum_wh for x in wh]

    return SeismicLoadResult(elevations_ft=list(elevations_ft),
                             forces_kip=forces, base_shear_kip=base_shear,
                             cs=cs, weights_kip=weights, sa_used=sa,
                             period_s=period)


def build_load_data(elevations_ft: list[float], adjusted_lbs: list[float],
                    seismic: SeismicLoadResult) -> LoadData:
    """Pair the lateral forces with vertical live loads (adjusted lb -> kip)."""
    if len(elevations_ft) != len(adjusted_lbs):
        raise InputError("elevations and adjusted loads must align")
    if elevations_ft != seismic.elevations_ft:
        raise InputError("seismic result computed for different elevations")
    live = [(e, w / 1000.0) for e, w in zip(elevations_ft, adjusted_lbs)]
    lateral = list(zip(seismic.elevations_ft, seismic.forces_kip))
    return LoadData(seismic=lateral, live=live,
                    base_shear_kip=seismic.base_shear_kip)
