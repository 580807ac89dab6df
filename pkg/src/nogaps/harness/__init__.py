"""Experiment configuration, seeded execution, statistics, reports and the CLI."""

from ..trials import TrialRecord, run_trials
from .config import EXPERIMENTS, ExperimentConfig, SummaryRequest, config_from_dict, load_config
from .report import csv_columns, emit_report, read_jsonl, record_line, to_csv, write_jsonl
from .stats import SummaryStats, summarize, wilson_interval
from .suite import fitted_constants, run_suite, trial_function
