"""Monte Carlo laboratory: validity, coverage and growth estimates plus scenario replays."""
from .config import SCENARIO_KINDS, ScenarioSpec, SimConfig, SimReport, describe
from .harness import growth_rate, mc_stopped_mean, run_replications, ville_coverage
from .rng import substream
from .scenarios import glr_inflation, p_hacking_replay, two_batch_replay, two_ones_replay, z_test_pvalue
