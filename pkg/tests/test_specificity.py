import math

import pytest

from mi_rewrite.metrics.specificity import (
    IdfTable,
    fit_idf,
    normalize_scores,
    raw_specificity,
    specificity_scores,
)

CORPUS = [
    "i feel stuck about my dieting",
    "dieting is hard and i feel tired",
    "my work schedule makes dieting difficult",
    "the chemotherapy appointment is tomorrow",
]


def test_fit_counts_documents_not_occurrences():
    table = fit_idf(["food food food", "food and water"])
    assert table.n_docs == 2
    assert table.doc_freq["food"] == 2
    assert table.doc_freq["water"] == 1


def test_idf_formula():
    table = fit_idf(CORPUS)
    # "dieting" appears in 3 of 4 documents
    assert table.idf("dieting") == pytest.approx(math.log(5 / 4) + 1.0)
    assert table.idf("chemotherapy") == pytest.approx(math.log(5 / 2) + 1.0)


def test_unseen_word_gets_maximum_idf():
    table = fit_idf(CORPUS)
    unseen = table.idf("zzyzx")
    assert unseen == pytest.approx(math.log(5 / 1) + 1.0)
    assert all(unseen >= table.idf(w) for w in table.doc_freq)


def test_stopword_only_response_raw_zero():
    table = fit_idf(CORPUS)
    assert raw_specificity(table, "it is what it is") == 0.0


def test_rare_words_outrank_common_words():
    table = fit_idf(CORPUS)
    rare = raw_specificity(table, "the chemotherapy appointment")
    common = raw_specificity(table, "i feel stuck about dieting")
    assert rare > common


def test_normalization_endpoints():
    normed = normalize_scores([2.0, 5.0, 3.5])
    assert normed[0] == 0.0
    assert normed[1] == 1.0
    assert normed[2] == pytest.approx(0.5)


def test_normalization_constant_set_maps_to_zero():
    assert normalize_scores([1.7, 1.7, 1.7]) == [0.0, 0.0, 0.0]
    assert normalize_scores([]) == []


def test_stopword_response_zero_after_normalization():
    table = fit_idf(CORPUS)
    scores = specificity_scores(
        table, ["it is what it is", "the chemotherapy appointment", "dieting"]
    )
    assert scores[0] == 0.0
    assert scores[1] == 1.0
    assert all(0.0 <= s <= 1.0 for s in scores)


def test_fit_empty_corpus_raises():
    with pytest.raises(ValueError):
        fit_idf([])


def test_table_is_plain_data():
    table = IdfTable(n_docs=3, doc_freq={"food": 2})
    assert table.idf("food") == pytest.approx(math.log(4 / 3) + 1.0)
