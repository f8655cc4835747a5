import json
from collections.abc import Sequence
from pathlib import Path

import numpy as np
import pandas as pd

from optibench import __version__
from optibench.applications import APPLICATIONS
from optibench.exceptions import FormatError, StorageError
from optibench.schemas import RECORD_COLUMNS, BenchConfig, BenchmarkRecord, Cell
from optibench.utils import current_timestamp, get_logger

logger = get_logger(__name__)

RESULTS_FILE = "results.csv"
META_FILE = "run_meta.json"
SUMMARY_FILE = "summary.csv"

GROUP_KEYS = [
    "application",
    "app_config",
    "problem_size",
    "mapping",
    "mapping_config",
    "solver",
    "solver_config",
    "device",
]
CONFIG_COLUMNS = ["app_config", "mapping_config", "solver_config"]
SUMMARY_COLUMNS = GROUP_KEYS + [
    "count",
    "tts_mean_ms",
    "tts_min_ms",
    "tts_max_ms",
    "quality_mean",
    "quality_min",
    "quality_max",
    "best_quality",
    "valid_ratio",
    "solver_share_mean",
]


def records_frame(records: Sequence[BenchmarkRecord]) -> pd.DataFrame:
    rows = [record.model_dump() for record in records]
    return pd.DataFrame(rows, columns=RECORD_COLUMNS)


class ResultsService:
    @staticmethod
    def persist(
        records: Sequence[BenchmarkRecord],
        cfg: BenchConfig,
        out_dir: str | Path,
        run_id: str,
        plan: Sequence[Cell] = (),
        extra_meta: dict | None = None,
    ) -> Path:
        """
        Writes results.csv (one row per record), run_meta.json and summary.csv.

        :return: The output directory
        :raises StorageError: When the directory or a file cannot be written
        """
        out = Path(out_dir)
        frame = records_frame(records)
        meta = {
            "run_id": run_id,
            "framework_version": __version__,
            "created_at": current_timestamp(),
            "n_records": len(records),
            "config": cfg.model_dump(mode="json"),
            "cells": [
                {
                    "index": cell.index,
                    "coordinates": list(cell.coordinates),
                    "cell_seed": cell.cell_seed,
                }
                for cell in plan
            ],
            **(extra_meta or {}),
        }
        try:
            out.mkdir(parents=True, exist_ok=True)
            frame.to_csv(out / RESULTS_FILE, index=False)
            (out / META_FILE).write_text(json.dumps(meta, indent=2), encoding="utf-8")
            ResultsService.summarize(frame).to_csv(out / SUMMARY_FILE, index=False)
        except OSError as e:
            raise StorageError(f"cannot write results to {out}: {e}") from e
        logger.info("Persisted %s records of run %s to %s", len(records), run_id, out)
        return out

    @staticmethod
    def load_records(path: str | Path) -> pd.DataFrame:
        """
        Reads a results.csv (or the directory holding it).

        :raises FormatError: Missing file, unreadable CSV or missing columns
        """
        path = Path(path)
        if path.is_dir():
            path = path / RESULTS_FILE
        try:
            frame = pd.read_csv(
                path,
                dtype={
                    "solver_metadata": str,
                    "error": str,
                    "run_id": str,
                    **dict.fromkeys(CONFIG_COLUMNS, str),
                },
                keep_default_na=True,
            )
        except FileNotFoundError as e:
            raise FormatError(f"results file {path} does not exist") from e
        except (pd.errors.EmptyDataError, pd.errors.ParserError) as e:
            raise FormatError(f"malformed results file {path}: {e}") from e
        missing = [c for c in RECORD_COLUMNS if c not in frame.columns]
        if missing:
            raise FormatError(f"results file {path} lacks columns {missing}")
        if frame["validity"].dtype != bool:
            flags = frame["validity"].astype(str).str.lower()
            flags = flags.map({"true": True, "false": False})
            if flags.isna().any():
                raise FormatError(f"validity column of {path} is not boolean")
            frame["validity"] = flags.astype(bool)
        return frame[RECORD_COLUMNS]

    @staticmethod
    def summarize(frame: pd.DataFrame) -> pd.DataFrame:
        """
        Plot-ready statistics per (application, size, mapping, solver, device),
        split further by each configuration fingerprint.
        Quality statistics only see valid runs since invalid ones carry none.
        """
        if frame.empty:
            return pd.DataFrame(columns=SUMMARY_COLUMNS)
        frame = frame.copy()
        tts = frame["tts_ms"].astype(float)
        share = frame["t_solver_ms"].astype(float) / tts.where(tts > 0, 1.0)
        frame["solver_share"] = share.where(tts > 0)
        frame["quality"] = frame["quality"].astype(float)
        frame["validity"] = frame["validity"].astype(bool)
        summary = (
            frame.groupby(GROUP_KEYS, sort=False, dropna=False)
            .agg(
                count=("tts_ms", "size"),
                tts_mean_ms=("tts_ms", "mean"),
                tts_min_ms=("tts_ms", "min"),
                tts_max_ms=("tts_ms", "max"),
                quality_mean=("quality", "mean"),
                quality_min=("quality", "min"),
                quality_max=("quality", "max"),
                valid_ratio=("validity", "mean"),
                solver_share_mean=("solver_share", "mean"),
            )
            .reset_index()
        )
        lower = summary["application"].map(
            lambda name: APPLICATIONS[name].lower_is_better
            if name in APPLICATIONS
            else True
        )
        summary["best_quality"] = np.where(
            lower.astype(bool), summary["quality_min"], summary["quality_max"]
        )
        return summary[SUMMARY_COLUMNS]

    @staticmethod
    def summarize_dir(in_dir: str | Path) -> pd.DataFrame:
        """Re-summarizes a persisted run and rewrites its summary.csv."""
        in_dir = Path(in_dir)
        summary = ResultsService.summarize(ResultsService.load_records(in_dir))
        try:
            summary.to_csv(in_dir / SUMMARY_FILE, index=False)
        except OSError as e:
            raise StorageError(f"cannot write summary to {in_dir}: {e}") from e
        return summary
