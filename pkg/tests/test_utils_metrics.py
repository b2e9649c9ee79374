import pandas as pd
import pytest

from utils.metrics import AccuracySummary, summarize_predictions, tally


def test_tally_counts_matching_positions():
    summary = tally([((0, 1, 2), (0, 1, 0)), ((1,), (1,))])
    assert summary == AccuracySummary(4, 3)
    assert summary.accuracy == 0.75


def test_tally_rejects_length_mismatch():
    with pytest.raises(ValueError):
        tally([((0, 1), (0,))])


def test_accuracy_undefined_for_zero_mentions():
    with pytest.raises(ValueError):
        AccuracySummary(0, 0).accuracy


def test_summarize_predictions_three_of_four():
    frame = pd.DataFrame(
        {"predicted": ["a", "b", "c", "d"], "gold": ["a", "b", "c", "x"]}
    )
    assert summarize_predictions(frame).to_dict() == {"accuracy": 0.75, "n_mentions": 4, "n_correct": 3}


def test_summarize_predictions_requires_gold():
    frame = pd.DataFrame({"predicted": ["a", "b"], "gold": ["a", None]})
    with pytest.raises(ValueError, match="missing gold"):
        summarize_predictions(frame)


def test_summarize_predictions_rejects_empty_frame():
    with pytest.raises(ValueError, match="empty prediction file"):
        summarize_predictions(pd.DataFrame(columns=["predicted", "gold"]))
