"""Recovered fraction of the oracle k-core estimator as the mean intersection
degree grows.  Equivalent CLI run:

    kcore-align sweep --config demos/configs/sweep.json --jobs 4 --plot-data sweep.tsv
"""
from pathlib import Path

from kcore_align import ExperimentConfig, run_experiment
from kcore_align.harness import plot_data_text

cfg = ExperimentConfig.load(Path(__file__).parent / "configs" / "sweep.json")
result = run_experiment(cfg, jobs=4)
print(plot_data_text(result.summary, "recovered_fraction"), end="")
print(plot_data_text(result.summary, "wrong_pairs"), end="")
