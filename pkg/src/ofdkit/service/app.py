"""FastAPI application exposing the toolkit as a stateless service.

Every endpoint takes the inputs inline (CSV text, ontology document,
dependency lines), runs the corresponding core routine, and returns JSON.
The CLI is a thin client of this app; tests drive it in-process.
"""

from __future__ import annotations

import math

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..discovery import DiscoveryConfig, discover_ofds
from ..harness import (
    InjectionLog,
    InjectionSpec,
    bench_grid,
    bench_rows_to_csv,
    inject_errors,
    score_repairs,
)
from ..inference import (
    INHERITANCE,
    SYNONYM,
    TRADITIONAL,
    KindMismatchError,
    OfdParseError,
    OfdSet,
    closure,
    implies,
    minimal_cover,
    parse_ofd,
    parse_ofd_text,
)
from ..ontology import OntologyError, ontology_from_doc
from ..relation import IngestionError, load_csv_text
from ..repair import BeamConfig, RepairInputError, RepairPair, ontology_repair_search
from ..senses import assignment_from_doc, sense_assignment
from . import schemas


def _kind_keys(kinds: list[str], theta: int) -> tuple[tuple[str, int], ...]:
    keys = []
    for kind in kinds:
        if kind == INHERITANCE:
            keys.append((INHERITANCE, theta))
        elif kind in (SYNONYM, TRADITIONAL):
            keys.append((kind, 0))
        else:
            raise HTTPException(400, f"unknown dependency kind {kind!r}")
    return tuple(keys)


def _parse_inputs(data_csv: str, has_header: bool, ontology_doc: dict):
    try:
        inst = load_csv_text(data_csv, has_header=has_header)
        onto = ontology_from_doc(ontology_doc)
    except (IngestionError, OntologyError, KeyError, TypeError) as exc:
        raise HTTPException(400, f"bad input: {exc}") from exc
    return inst, onto


def _parse_sigma(lines: list[str]) -> OfdSet:
    try:
        return parse_ofd_text("\n".join(lines))
    except OfdParseError as exc:
        raise HTTPException(400, str(exc)) from exc


def create_app() -> FastAPI:
    app = FastAPI(title="ofdkit", version=__version__)

    @app.get("/health", response_model=schemas.HealthResponse)
    def health() -> schemas.HealthResponse:
        return schemas.HealthResponse(version=__version__)

    @app.post("/discover", response_model=schemas.DiscoverResponse)
    def discover(req: schemas.DiscoverRequest) -> schemas.DiscoverResponse:
        inst, onto = _parse_inputs(req.data_csv, req.has_header, req.ontology)
        cfg = DiscoveryConfig(
            kinds=_kind_keys(req.kinds, req.theta),
            kappa=req.kappa,
            opt2="2" in req.opts,
            opt3="3" in req.opts,
            opt4="4" in req.opts,
            max_level=req.max_level,
            exclude=tuple(req.exclude),
            threads=req.threads,
        )
        try:
            sigma, stats = discover_ofds(inst, onto, cfg)
        except (ValueError, KeyError) as exc:
            raise HTTPException(400, str(exc)) from exc
        oracle_match = None
        if req.verify_with_oracle:
            from ..oracle import BudgetExceeded, OracleBudget, enumerate_ofds_naive

            try:
                naive = enumerate_ofds_naive(
                    inst,
                    onto,
                    cfg.kinds,
                    kappa=cfg.kappa,
                    exclude=cfg.exclude,
                    budget=OracleBudget(max_arity=8, max_tuples=200),
                )
            except BudgetExceeded as exc:
                raise HTTPException(400, f"oracle check refused: {exc}") from exc
            lattice_capped = cfg.max_level is not None and cfg.max_level < len(
                (set(inst.attribute_names)) - set(cfg.exclude)
            )
            oracle_match = sigma == naive if not lattice_capped else None
        return schemas.DiscoverResponse(
            ofds=sigma.to_lines(), stats=stats.to_doc(), oracle_match=oracle_match
        )

    @app.post("/infer", response_model=schemas.InferResponse)
    def infer(req: schemas.InferRequest) -> schemas.InferResponse:
        sigma = _parse_sigma(req.sigma)
        out = schemas.InferResponse()
        try:
            if req.closure_of is not None:
                out.closure = sorted(closure(frozenset(req.closure_of), sigma))
            if req.implies_line is not None:
                out.implies = implies(sigma, parse_ofd(req.implies_line))
            if req.minimal_cover:
                out.minimal_cover = minimal_cover(sigma).to_lines()
        except (KindMismatchError, OfdParseError, ValueError) as exc:
            raise HTTPException(400, str(exc)) from exc
        return out

    @app.post("/assign-senses", response_model=schemas.AssignSensesResponse)
    def assign_senses(req: schemas.AssignSensesRequest) -> schemas.AssignSensesResponse:
        inst, onto = _parse_inputs(req.data_csv, req.has_header, req.ontology)
        sigma = _parse_sigma(req.ofds)
        try:
            result = sense_assignment(inst, sigma, onto, req.theta_emd)
        except (ValueError, KeyError) as exc:
            raise HTTPException(400, str(exc)) from exc
        return schemas.AssignSensesResponse(
            assignments=result.to_doc(),
            literal_classes=[list(k) for k in result.literal_classes],
        )

    @app.post("/clean", response_model=schemas.CleanResponse)
    def clean(req: schemas.CleanRequest) -> schemas.CleanResponse:
        inst, onto = _parse_inputs(req.data_csv, req.has_header, req.ontology)
        sigma = _parse_sigma(req.ofds)
        tau: int | None = None
        if req.tau is not None:
            if 0 < req.tau < 1:
                consequents = {o.single_consequent for o in sigma if o.is_normalized}
                tau = math.ceil(req.tau * inst.size * max(1, len(consequents)))
            else:
                tau = int(req.tau)
        try:
            if req.senses is not None:
                assignment = assignment_from_doc(req.senses, inst, sigma)
            else:
                assignment = sense_assignment(inst, sigma, onto, req.theta_emd)
            pairs, report = ontology_repair_search(
                inst, sigma, onto, assignment,
                BeamConfig(tau=tau, beam=req.beam, k_max=req.k_max),
            )
        except (RepairInputError, ValueError, KeyError) as exc:
            raise HTTPException(400, str(exc)) from exc
        report["tau"] = tau
        report["senses"] = assignment.to_doc()
        return schemas.CleanResponse(
            repairs=[p.to_doc() for p in pairs],
            report=report,
            feasible=bool(pairs),
        )

    @app.post("/inject-errors", response_model=schemas.InjectResponse)
    def inject(req: schemas.InjectRequest) -> schemas.InjectResponse:
        inst, onto = _parse_inputs(req.data_csv, req.has_header, req.ontology)
        sigma = _parse_sigma(req.ofds)
        try:
            spec = InjectionSpec(err=req.err, inc=req.inc, mode=req.mode)
            dirty, reduced, log = inject_errors(inst, onto, sigma, spec, req.seed)
        except ValueError as exc:
            raise HTTPException(400, str(exc)) from exc
        return schemas.InjectResponse(
            dirty_csv=dirty.to_csv(),
            reduced_ontology=reduced.to_doc(),
            truth_log=log.to_doc(),
        )

    @app.post("/score", response_model=schemas.ScoreResponse)
    def score(req: schemas.ScoreRequest) -> schemas.ScoreResponse:
        try:
            pair = RepairPair(
                insertions=tuple(
                    (i["value"], i["sense"], i["class"])
                    for i in req.repair.get("insertions", [])
                ),
                cell_updates=tuple(
                    (u["tuple"], u["attr"], u.get("old", ""), u["new"])
                    for u in req.repair.get("cell_updates", [])
                ),
                dist_s=req.repair.get("dist_s", 0),
                dist_i=req.repair.get("dist_i", 0),
                delta_p=req.repair.get("delta_p", 0),
                cover=tuple(req.repair.get("cover", [])),
            )
            scores = score_repairs(pair, InjectionLog.from_doc(req.truth_log))
        except (KeyError, TypeError, ValueError) as exc:
            raise HTTPException(400, f"bad repair or log document: {exc}") from exc
        return schemas.ScoreResponse(**scores.to_doc())

    @app.post("/bench", response_model=schemas.BenchResponse)
    def bench(req: schemas.BenchRequest) -> schemas.BenchResponse:
        try:
            rows = bench_grid(req.ns, req.arities, req.seed, req.kappa)
        except ValueError as exc:
            raise HTTPException(400, str(exc)) from exc
        return schemas.BenchResponse(rows=rows, csv=bench_rows_to_csv(rows))

    return app


app = create_app()
