"""The task-completion scorecard and the experiment grid.

Evaluation rolls each test dialog forward with the model's own previous
outputs (no gold context), relexicalizes placeholders from the values the
user actually mentioned, and scores five things: entity match rate (was the
final belief exactly right?), Success F1 (were the requested slots answered?),
Inform and Success (did the dialog offer a correct entity and answer every
request?), and corpus BLEU over responses.  The headline number is
combined = (inform + success) * 0.5 + BLEU.

Run:  python3 demos/06_evaluation.py      (a couple of minutes: it trains
      a baseline and a paraphrase-augmented model, one seed each)
"""

import tempfile
from pathlib import Path

from dialaug import run_experiment, synth_corpus
from dialaug.evaluation import MODE_NONE, MODE_PARG
from dialaug.neural import ModelConfig


def main() -> None:
    corpus = synth_corpus(12, seed=1)
    cfg = ModelConfig(embed_dim=32, hidden_dim=32, max_epochs=40, batch_size=4)
    print(f"grid: full data x (baseline, paraphrase-augmented) x 1 seed on {len(corpus.dialogs)} synthetic dialogs")
    print("splits 3:1:1, each cell = mine -> augment -> train -> roll out test dialogs -> score\n")

    report = run_experiment(corpus, [1.0], [MODE_NONE, MODE_PARG], [0], cfg)

    print("=== report (markdown) ===")
    print(report.to_markdown())

    print("=== combined-score identity, checked per row ===")
    for cell in report.cells:
        expected = (cell.inform + cell.success) * 0.5 + cell.bleu
        print(f"  {cell.augmentation:5s}: combined {cell.combined:.4f} == "
              f"(inform {cell.inform:.2f} + success {cell.success:.2f}) * 0.5 + bleu {cell.bleu:.4f}")
        assert abs(cell.combined - expected) <= 1e-9

    with tempfile.TemporaryDirectory() as tmp:
        json_p, md_p, timing_p = (Path(tmp) / n for n in ("report.json", "report.md", "timings.json"))
        report.save(json_p, md_p, timing_p)
        print("\n=== files ===")
        for p in (json_p, md_p, timing_p):
            print(f"  {p.name}: {p.stat().st_size} bytes")
        print("(wall-clock runtimes live only in the timing sidecar, so the")
        print(" report files are byte-identical across reruns)")

    print("\nTakeaway: one call runs the whole augmentation experiment and the")
    print("report's headline score is an auditable identity, not a black box.")


if __name__ == "__main__":
    main()
