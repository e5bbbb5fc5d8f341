import logging
from typing import Any, Dict, List, Optional

from fastapi import BackgroundTasks, FastAPI, HTTPException
from pydantic import BaseModel, Field, model_validator

from freqinfl.config import ExperimentConfig, build, environment_values
from freqinfl.errors import DataError, FreqInflError
from freqinfl.metrics import evaluate
from freqinfl.pipeline import run_language
from freqinfl.schema import (AppConfig, LexEntry, Lexicon, ModelKind, MorphTag, Prediction, SelectionMetric,
                             SweepResult, System, TrainingMode)
from freqinfl.splitter import read_split

logging.basicConfig(level=environment_values(["log_level"]).get("log_level", "INFO").upper())
logger = logging.getLogger(__name__)

app = FastAPI(title="freqinfl")
jobs: Dict[str, Dict[str, Any]] = {}  # in-memory job tracking


class SweepRequest(BaseModel):
    job_id: str
    language: str = "und"
    split_dir: Optional[str] = None
    treebanks: List[str] = Field(default_factory=list)
    temperatures: List[float] = Field(default_factory=lambda: list(AppConfig.TEMPERATURES))
    model: ModelKind = ModelKind.RULES
    mode: TrainingMode = TrainingMode.EXPECTATION
    seed: int = 0
    seeds: List[int] = Field(default_factory=lambda: [0])
    select_by: SelectionMetric = SelectionMetric.TOKEN
    output_dir: Optional[str] = None

    @model_validator(mode="after")
    def _need_data(self) -> "SweepRequest":
        if not self.split_dir and not self.treebanks:
            raise ValueError("either split_dir or treebanks is required")
        return self


class GoldRow(BaseModel):
    lemma: str
    tag: str
    form: str
    count: int = 1


class PredictionRow(BaseModel):
    lemma: str
    tag: str
    prediction: str


class EvaluateRequest(BaseModel):
    gold: List[GoldRow]
    predictions: List[PredictionRow]


def summarize(result: SweepResult) -> Dict[str, Any]:
    systems = {}
    for system in System:
        outcome = result.system_outcome(system)
        systems[system.value] = {"type_acc": outcome.type_accuracy, "token_acc": outcome.token_accuracy}
    return {
        "language": result.language,
        "tau_best": result.tau_best,
        "select_by": SelectionMetric(result.selection_metric).value,
        "test": systems,
        "dev": {repr(tau): result.dev_outcome(tau).accuracy(result.selection_metric) for tau in result.swept},
    }


def run_sweep_job(job_id: str, req: SweepRequest) -> None:
    try:
        config = build(
            ExperimentConfig,
            language=req.language,
            treebanks=tuple(req.treebanks),
            temperatures=tuple(req.temperatures),
            model=req.model,
            mode=req.mode,
            seed=req.seed,
            seeds=tuple(req.seeds),
            select_by=req.select_by,
            output_dir=req.output_dir,
        )
        data_split = read_split(req.split_dir) if req.split_dir else None
        result = run_language(config, data_split=data_split)
        jobs[job_id] = {"status": "complete", "result": summarize(result)}
    except FreqInflError as e:
        logger.error(f"Job {job_id} failed: {e}")
        jobs[job_id] = {"status": "error", "error": str(e), "exit_code": e.exit_code}
    except Exception as e:
        logger.exception(f"Job {job_id} crashed: {e}")
        jobs[job_id] = {"status": "error", "error": str(e), "exit_code": DataError.exit_code}


@app.post("/sweep/")
async def start_sweep(req: SweepRequest, background_tasks: BackgroundTasks):
    if jobs.get(req.job_id, {}).get("status") == "processing":
        raise HTTPException(status_code=409, detail=f"Job {req.job_id} is already running")
    jobs[req.job_id] = {"status": "processing", "result": None}
    background_tasks.add_task(run_sweep_job, req.job_id, req)
    return {"message": "Sweep started", "job_id": req.job_id}


@app.get("/status/{job_id}")
def get_status(job_id: str):
    job = jobs.get(job_id)
    if not job:
        raise HTTPException(status_code=404, detail="Job not found")
    return job


@app.post("/evaluate/")
def evaluate_predictions(req: EvaluateRequest):
    try:
        gold = Lexicon(tuple(LexEntry(row.lemma, MorphTag.parse(row.tag), row.form, row.count) for row in req.gold))
        predictions = [Prediction(row.lemma, MorphTag.parse(row.tag), row.prediction) for row in req.predictions]
        outcome = evaluate(predictions, gold)
    except DataError as e:
        raise HTTPException(status_code=400, detail=str(e))
    return {
        "type_acc": outcome.type_accuracy,
        "token_acc": outcome.token_accuracy,
        "items": outcome.item_total,
        "tokens": outcome.token_total,
        "correct_items": outcome.correct_items,
        "correct_tokens": outcome.correct_tokens,
        "free_variation_keys": outcome.free_variation_keys,
    }
