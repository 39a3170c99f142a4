"""End-to-end analysis of a field: classification through portraits."""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field, replace

import numpy as np

from .field import EquilibriumRecord, RationalField, SpherePoint, classify, hamiltonian_data
from .flow import IntegratorConfig, integrate
from .nondeg import NondegConfig, NondegReport, check_nondegeneracy
from .portrait import ConnectionGraph, PlaneMultigraph, build_portraits, canonical_code, check_duality, reduced_connection_graph
from .separatrix import Separatrix, trace_boundary_separatrices, trace_pole_separatrices

DEGENERATE = ("Center", "DegenerateZero", "DegeneratePole")

# separatrices bounding a center annulus circle it until the budget runs out;
# with centers present the portraits fail anyway, so the budget is capped
CENTER_STEP_CAP = 5000


class AnalysisError(RuntimeError):
    """Analysis failure tagged with the stage that raised it."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage
        self.message = message


@dataclass
class Analysis:
    field: RationalField
    records: list[EquilibriumRecord]
    nondeg: NondegReport | None = None
    separatrices: list[Separatrix] = dc_field(default_factory=list)
    cplus: PlaneMultigraph | None = None
    cminus: PlaneMultigraph | None = None
    connection: ConnectionGraph | None = None
    reduced: PlaneMultigraph | None = None
    nc_trees: tuple | None = None
    duality: object | None = None

    def codes(self) -> dict:
        out = {}
        if self.cplus is not None:
            out["C+"] = canonical_code(self.cplus).code
            out["C-"] = canonical_code(self.cminus).code
        if self.reduced is not None:
            out["reduced"] = canonical_code(self.reduced, "preserve", "allow_reversal").code
        if self.nc_trees is not None:
            from .combinat import nc_canonical

            out["red_nc_tree"] = nc_canonical(self.nc_trees[0], "preserve")
            out["blue_nc_tree"] = nc_canonical(self.nc_trees[1], "preserve")
        return out

    def to_json(self, samples: bool = False) -> dict:
        def sep_json(s: Separatrix) -> dict:
            if samples:
                return s.to_json()
            return {
                "id": s.id,
                "color": s.color,
                "terminal": s.terminal,
                "blowup_time": s.blowup_time,
                "blowup_integral": s.blowup_integral,
                "verdict": s.trajectory.verdict.tag,
                "suspicions": s.suspicions,
            }

        return {
            "field": self.field.to_json(),
            "equilibria": [r.to_json() for r in self.records],
            "nondegeneracy": self.nondeg.to_json() if self.nondeg is not None else None,
            "separatrices": [sep_json(s) for s in self.separatrices],
            "portraits": {
                "C+": self.cplus.to_json() if self.cplus is not None else None,
                "C-": self.cminus.to_json() if self.cminus is not None else None,
                "connection_graph": self.connection.to_json() if self.connection is not None else None,
                "reduced": self.reduced.to_json() if self.reduced is not None else None,
            },
            "duality": self.duality.to_json() if self.duality is not None else None,
            "codes": self.codes(),
        }


def structured(fld: RationalField) -> bool:
    """Fields with a degenerate point at infinity handled through boundary saddles."""
    return fld.is_antipolynomial or (fld.is_polynomial and fld.d >= 3)


def trace_all(fld: RationalField, cfg: IntegratorConfig | None = None, blowup: bool = True) -> list[Separatrix]:
    """Separatrices of every simple pole saddle, plus the boundary ones in the structured modes."""
    seps: list[Separatrix] = []
    if structured(fld):
        return trace_boundary_separatrices(fld, cfg)
    for r in classify(fld):
        if r.kind == "PoleSaddle":
            seps.extend(trace_pole_separatrices(fld, r.id, cfg, blowup=blowup))
    return seps


def analyze(
    fld: RationalField,
    cfg: IntegratorConfig | None = None,
    ncfg: NondegConfig | None = None,
    portraits: bool = True,
) -> Analysis:
    """Classify, check nondegeneracy, trace separatrices and assemble portraits.

    Raises
    ------
    AnalysisError
        With ``stage`` one of ``classify``, ``trace``, ``portrait``.
    """
    try:
        recs = classify(fld)
    except Exception as exc:  # root finding or field errors
        raise AnalysisError("classify", str(exc)) from exc
    out = Analysis(fld, recs)
    if fld.d >= 1:
        out.nondeg = check_nondegeneracy(fld, ncfg)
    if any(r.kind == "Center" for r in recs):
        cfg = replace(cfg or IntegratorConfig(), max_steps=min((cfg or IntegratorConfig()).max_steps, CENTER_STEP_CAP))
    try:
        out.separatrices = trace_all(fld, cfg)
    except Exception as exc:
        raise AnalysisError("trace", f"{type(exc).__name__}: {exc}") from exc
    if not portraits:
        return out
    try:
        if fld.is_polynomial:
            out.reduced = reduced_connection_graph(fld, out.separatrices if fld.d >= 3 else None, cfg)
        if fld.is_antipolynomial:
            from .realize import antipolynomial_trees

            out.nc_trees = antipolynomial_trees(fld, cfg, out.separatrices)
        elif not structured(fld):
            bad = [f"{r.id} ({r.kind})" for r in recs if r.kind in DEGENERATE]
            if bad:
                raise AnalysisError("portrait", "degenerate equilibria: " + ", ".join(bad))
            sus = [s.id for s in out.separatrices if s.suspicions]
            if sus:
                raise AnalysisError("portrait", f"saddle connection suspected on {sus}")
            out.cplus, out.cminus, out.connection = build_portraits(fld, out.separatrices)
            out.duality = check_duality(out.cplus, out.cminus)
    except AnalysisError:
        raise
    except Exception as exc:
        raise AnalysisError("portrait", f"{type(exc).__name__}: {exc}") from exc
    return out


def hamiltonian_drift(
    fld: RationalField,
    n_orbits: int = 20,
    radius: float = 1.5,
    t_max: float = 5.0,
    seed: int = 0,
    cfg: IntegratorConfig | None = None,
) -> list[float]:
    """Largest change of ``H = Im F`` along sampled real-time orbits.

    Starts are uniform in the disk ``|w| < radius``; each orbit is followed in
    the regularized flow for ``t_max`` or until an event, and only samples
    inside the disk ``|w| < 2 radius`` are compared, which keeps ``|F|``
    bounded.
    """
    ham = hamiltonian_data(fld)
    rng = np.random.default_rng(seed)
    drifts = []
    while len(drifts) < n_orbits:
        w0 = complex(radius * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform()))
        if min(abs(w0 - p) for p in fld.poles) < 1e-3:
            continue
        traj = integrate(fld, SpherePoint.from_w(w0), t_max=t_max, cfg=cfg)
        h0 = ham.H(w0)
        worst = 0.0
        for s in traj.samples:
            w = s.point.w
            if abs(w) < 2 * radius:
                worst = max(worst, abs(ham.H(w) - h0))
        drifts.append(worst)
    return drifts
