"""Smoke tests for the python bindings, including a scipy cross-check of the
rank correlation."""

import math

import pytest

import charprobe as cp

G = cp.SPACE_MARKER


def make_table(rules):
    table = cp.MergeTable()
    table.stage_major = True
    for left, right in rules:
        for side in (left, right):
            body = cp.strip_marker(side)
            if cp.has_marker(side):
                table.add_base_symbol(G)
            for ch in body:
                table.add_base_symbol(ch)
        table.add_rule(left, right)
    return table


def test_priority_order_walkthrough():
    table = make_table(
        [(G, "a"), ("b", "c"), ("c", "d"), (G + "a", "b"), ("bc", "d"), (G + "a", "bc")]
    )
    assert cp.apply_merges(G + "abcd", table) == [G + "a", "bcd"]

    flipped = make_table(
        [(G, "a"), ("c", "d"), ("b", "c"), (G + "a", "b"), ("bc", "d"), (G + "a", "bc")]
    )
    assert cp.apply_merges(G + "abcd", flipped) == [G + "ab", "cd"]


def test_three_letter_segmentation():
    assert cp.tokenize_tcs(G + "enterprise") == [G + "ent", "erp", "ris", "e"]
    assert cp.tokenize_tcs(G + "to") == [G + "to"]
    assert cp.tokenize_tcs("abcd") == ["abc", "d"]


def test_controlled_tokenizer_shape():
    tok = cp.build_controlled_tokenizer(cp.SeedSpec(11, "controlled"))
    assert len(tok.vocab) == 36556
    assert tok.merges.rule_count == 36530
    assert tok.merges.rank_of("ab", "c") is not None
    assert tok.merges.rank_of("a", "bc") is None


def test_word_tokenization_round_trip():
    text = "she dreams of tokenized text"
    tokens = cp.tokenize_word(text)
    assert tokens[0] == "she"
    assert tokens[1] == G + "dreams"
    assert cp.detokenize(tokens) == text


def test_bpe_training_end_to_end(tmp_path):
    corpus = cp.Corpus(["low lower lowest low low", "lowly lows"])
    tok = cp.train_bpe(corpus, 16)
    assert len(tok.vocab) == 16
    encoded = cp.encode_corpus(corpus, "bpe", tok.vocab, tok.merges)
    assert encoded.token_count > 0

    merges_path = str(tmp_path / "merges.txt")
    cp.write_merges(tok.merges, merges_path)
    back = cp.read_merges(merges_path)
    assert back.rule_count == tok.merges.rule_count


def test_charpert_preserves_skeleton():
    stream = cp.derive_stream(cp.SeedSpec(3, "charpert"), 0)
    out = cp.charpert("she dreams, twice!", stream)
    assert len(out) == len("she dreams, twice!")
    assert out[3] == " "
    assert out[10] == ","
    assert out.endswith("!")


def test_porter_reference_samples():
    assert cp.porter_stem("caresses") == "caress"
    assert cp.porter_stem("sky") == "sky"
    assert cp.porter_stem("generalizations") == "gener"
    assert cp.porter_stem("") == ""


def test_probe_dataset_matching():
    vocab = cp.Vocabulary()
    for token in ["ab", "cb", "xy", "zz", G + "qqq", "abc"]:
        vocab.add(token)
    filtered = cp.filter_vocab(vocab)
    stream = cp.derive_stream(cp.SeedSpec(5, "probedata"), 0)
    dataset = cp.build_dataset(vocab, filtered, "b", cp.MatchingMode.MATCHED, stream)
    positives = [e for e in dataset.examples if e.label]
    negatives = [e for e in dataset.examples if not e.label]
    assert len(positives) == len(negatives)
    assert sorted(cp.token_alpha_length(e.token) for e in positives) == sorted(
        cp.token_alpha_length(e.token) for e in negatives
    )


def test_spearman_against_scipy():
    scipy_stats = pytest.importorskip("scipy.stats")
    rng_x = cp.derive_stream(cp.SeedSpec(9, "x"), 0)
    rng_y = cp.derive_stream(cp.SeedSpec(9, "y"), 0)
    x = [rng_x.next_double() for _ in range(200)]
    y = [0.4 * xi + 0.6 * rng_y.next_double() for xi in x]
    # inject ties to exercise average ranks
    x[10] = x[20] = x[30]
    y[5] = y[15]
    ours = cp.spearman(x, y)
    theirs = scipy_stats.spearmanr(x, y)
    assert math.isclose(ours.rho, theirs.statistic, rel_tol=0, abs_tol=1e-12)


def test_embedding_matrix_round_trip(tmp_path):
    np = pytest.importorskip("numpy")
    matrix = cp.EmbeddingMatrix()
    matrix.values = np.arange(12, dtype=np.float32).reshape(3, 4) / 7.0
    matrix.vocab_hash = 1234567
    path = str(tmp_path / "m.bin")
    cp.write_matrix(matrix, path)
    back = cp.read_matrix(path)
    assert back.vocab_size == 3
    assert back.dim == 4
    assert back.vocab_hash == 1234567
    assert np.array_equal(back.values, matrix.values)
    with pytest.raises(cp.DataError):
        cp.read_matrix_checked(path, 999)


def test_condition_enumeration_clean():
    stream = cp.derive_stream(cp.SeedSpec(21, "conditions"), 0)
    report = cp.enumerate_conditions(4, 2000, stream)
    assert report.total_violations() == 0
    assert all(p.target_hits > 0 for p in report.patterns)


def test_tiny_probe_pipeline():
    # linearly separable embeddings learn almost perfectly
    np = pytest.importorskip("numpy")
    n = 120
    values = np.zeros((2 * n, 6), dtype=np.float32)
    values[:n, 0] = 1.0
    values[n:, 0] = -1.0
    emb = cp.EmbeddingMatrix()
    emb.values = values

    data = cp.ProbeDataset()
    data.target_char = "a"
    data.examples = [
        cp.ProbeExample("t", i, i < n) for i in range(2 * n)
    ]
    cfg = cp.TrainConfig()
    cfg.hidden1 = 16
    cfg.hidden2 = 8
    cfg.seed = cp.SeedSpec(31, "probe")
    model = cp.train_probe(emb, data, cfg)
    counts = cp.eval_probe(model, emb, data)
    assert counts.correct / counts.total >= 0.99
