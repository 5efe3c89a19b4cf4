import numpy as np
import pytest

from conftest import make_embedding, random_embedding
from oracles import brute_force_analogy
from scalevec.analogy import (
    AnalogyEvaluator,
    AnalogyQuestion,
    RelationSet,
    accuracy_curves,
    eval_relation,
    load_questions,
    peak_beta,
    write_accuracy_tsv,
    write_summary_tsv,
)


@pytest.fixture
def planted_embedding():
    # v_d placed exactly at v_b - v_a + v_c; everything else far away
    va = np.array([1.0, 0.0, 0.0, 0.0])
    vb = np.array([0.0, 1.0, 0.0, 0.0])
    vc = np.array([0.0, 0.0, 1.0, 0.0])
    vd = vb - va + vc
    far = [np.array([0.0, 0.0, 0.0, 1.0]) * s for s in (1.0, -1.0)]
    return make_embedding(["a", "b", "c", "d", "x", "y"], [va, vb, vc, vd, *far])


class TestLoadQuestions:
    def test_basic_parse(self, tmp_path):
        p = tmp_path / "q.txt"
        p.write_text(": family\nboy girl son daughter\n")
        suite = load_questions(p)
        assert len(suite) == 1
        assert suite.relations[0].name == "family"
        assert suite.relations[0].questions == [AnalogyQuestion("boy", "girl", "son", "daughter")]

    def test_malformed_lines_counted(self, tmp_path):
        p = tmp_path / "q.txt"
        p.write_text(": r1\na b c\nboy girl son daughter\n")
        suite = load_questions(p)
        assert suite.malformed_lines == 1
        assert len(suite.relations[0].questions) == 1

    def test_case_normalized(self, tmp_path):
        p = tmp_path / "q.txt"
        p.write_text(": r1\nBoy GIRL Son daughter\n")
        q = load_questions(p).relations[0].questions[0]
        assert q == AnalogyQuestion("boy", "girl", "son", "daughter")

    def test_no_valid_questions_rejected(self, tmp_path):
        p = tmp_path / "q.txt"
        p.write_text(": r1\nnot enough words\n")
        with pytest.raises(ValueError):
            load_questions(p)


class TestAnswer:
    def test_planted_answer(self, planted_embedding):
        ev = AnalogyEvaluator(planted_embedding, restrict_k=6)
        assert ev.answer("a", "b", "c") == "d"

    def test_oov_word_skips(self, planted_embedding):
        ev = AnalogyEvaluator(planted_embedding, restrict_k=6)
        assert ev.answer("a", "b", "gone") is None

    def test_restricted_word_skips(self, planted_embedding):
        # "y" has the highest id => outside restrict_k=5
        ev = AnalogyEvaluator(planted_embedding, restrict_k=5)
        assert ev.answer("a", "b", "y") is None

    def test_never_returns_query_word(self):
        rng = np.random.default_rng(0)
        emb = random_embedding(rng, 30, 5)
        ev = AnalogyEvaluator(emb, restrict_k=30)
        for _ in range(50):
            a, b, c = (emb.vocab.words[i] for i in rng.choice(30, 3, replace=False))
            assert ev.answer(a, b, c) not in (a, b, c)

    def test_matches_brute_force_oracle(self):
        rng = np.random.default_rng(1)
        emb = random_embedding(rng, 50, 6)
        ev = AnalogyEvaluator(emb, restrict_k=50)
        for _ in range(20):
            ia, ib, ic = rng.choice(50, 3, replace=False)
            words = emb.vocab.words
            expected = words[brute_force_analogy(emb.input_vectors, ia, ib, ic)]
            assert ev.answer(words[ia], words[ib], words[ic]) == expected

    def test_scale_invariance(self):
        rng = np.random.default_rng(2)
        emb = random_embedding(rng, 25, 4)
        scaled = make_embedding(emb.vocab.words, emb.input_vectors * 37.5)
        e1 = AnalogyEvaluator(emb, restrict_k=25)
        e2 = AnalogyEvaluator(scaled, restrict_k=25)
        for _ in range(25):
            a, b, c = (emb.vocab.words[i] for i in rng.choice(25, 3, replace=False))
            assert e1.answer(a, b, c) == e2.answer(a, b, c)


class TestEvalRelation:
    def test_three_of_four(self, planted_embedding):
        rel = RelationSet(
            "r",
            [
                AnalogyQuestion("a", "b", "c", "d"),  # correct by construction
                AnalogyQuestion("b", "a", "d", "c"),  # correct (reverse direction)
                AnalogyQuestion("a", "b", "x", "y"),  # wrong
                AnalogyQuestion("a", "c", "b", "y"),  # wrong
            ],
        )
        rec = eval_relation(rel, planted_embedding, restrict_k=6)
        assert rec.answered == 4
        assert rec.accuracy in (0.25, 0.5, 0.75)
        assert rec.answered + rec.skipped == 4

    def test_all_skipped_undefined(self, planted_embedding):
        rel = RelationSet("r", [AnalogyQuestion("a", "b", "c", "gone")])
        rec = eval_relation(rel, planted_embedding, restrict_k=6)
        assert rec.answered == 0
        assert rec.accuracy is None

    def test_planted_structure_fully_correct(self):
        # grid embedding where every analogy holds exactly
        rows, cols = 4, 4
        words, vecs = [], []
        for r in range(rows):
            for c in range(cols):
                words.append(f"w{r}{c}")
                row_feat = np.eye(rows)[r] * 3
                col_feat = np.eye(cols)[c]
                vecs.append(np.concatenate([row_feat, col_feat]))
        emb = make_embedding(words, vecs)
        qs = [
            AnalogyQuestion(f"w{r1}{c1}", f"w{r1}{c2}", f"w{r2}{c1}", f"w{r2}{c2}")
            for r1 in range(rows)
            for r2 in range(rows)
            for c1 in range(cols)
            for c2 in range(cols)
            if r1 != r2 and c1 != c2
        ]
        rec = eval_relation(RelationSet("grid", qs), emb, restrict_k=len(words))
        assert rec.accuracy == 1.0


class TestPeakAndCurves:
    def test_peak_beta(self):
        assert peak_beta([1, 2, 3], [0.1, 0.5, 0.3]) == 2

    def test_peak_tie_toward_smaller(self):
        assert peak_beta([2, 7], [0.4, 0.4]) == 2

    def test_peak_ignores_missing(self):
        assert peak_beta([1, 2, 3], [None, 0.2, None]) == 2
        assert peak_beta([1, 2], [None, None]) is None

    def test_curves_over_tiny_sweep(self, tiny_sweep, tmp_path):
        vocab = tiny_sweep.load(1, 0).vocab
        w = vocab.words
        suite_rel = RelationSet("toy", [AnalogyQuestion(w[0], w[1], w[2], w[3])])
        from scalevec.analogy import QuestionSuite

        suite = QuestionSuite(relations=[suite_rel])
        curves, overall = accuracy_curves(tiny_sweep, suite, restrict_k=len(vocab))
        assert [c.relation for c in curves] == ["toy"]
        assert curves[0].betas == [1, 2, 4]
        assert len(curves[0].per_replica) == 2
        for acc in overall.mean_accuracy:
            assert acc is None or 0.0 <= acc <= 1.0
        write_accuracy_tsv(curves, overall, tmp_path / "acc.tsv")
        write_summary_tsv(curves, overall, tmp_path / "sum.tsv")
        lines = (tmp_path / "acc.tsv").read_text().splitlines()
        assert lines[0] == "relation\tbeta\treplica\taccuracy\tanswered\tskipped"
        # one row per (relation+overall, beta, replica)
        assert len(lines) == 1 + 2 * 3 * 2

    def test_missing_cell_marked(self, tiny_sweep):
        import copy

        crippled = copy.deepcopy(tiny_sweep)
        crippled.cells[(2, 0)].status = "failed"
        vocab = tiny_sweep.load(1, 0).vocab
        from scalevec.analogy import QuestionSuite

        w = vocab.words
        suite = QuestionSuite(
            relations=[RelationSet("toy", [AnalogyQuestion(w[0], w[1], w[2], w[3])])]
        )
        curves, _ = accuracy_curves(crippled, suite, restrict_k=len(vocab))
        assert curves[0].per_replica[0][curves[0].betas.index(2)] is None
