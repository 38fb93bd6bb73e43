"""The two scores that gate paraphrase mining: BLEU and diversity.

BLEU (modified n-gram precision up to 4-grams, brevity penalty, optional
add-one smoothing on zero counts) measures how much surface material two
utterances share; diversity is their word-level edit distance, measuring how
much they differ.  A mined paraphrase pair must clear BOTH bars: similar
enough to be the same thing (BLEU >= 0.2), different enough to be worth
learning from (diversity >= 3.4).

Run:  python3 demos/02_text_metrics.py
"""

from dialaug import BleuConfig, corpus_bleu, diversity, sentence_bleu
from dialaug.textmetrics import SMOOTH_NONE


def show(label: str, hyp: str, ref: str) -> None:
    h, r = hyp.split(), ref.split()
    smoothed = sentence_bleu(h, r)
    raw = sentence_bleu(h, r, BleuConfig(smoothing=SMOOTH_NONE))
    div = diversity(h, r)
    verdict = "PASS" if (smoothed >= 0.2 and div >= 3.4) else "fail"
    print(f"\n--- {label} ---")
    print(f"  hyp: {hyp}")
    print(f"  ref: {ref}")
    print(f"  BLEU {smoothed:.4f} (unsmoothed {raw:.4f})   diversity {div}   mining gates: {verdict}")


def main() -> None:
    print("Sentence-level BLEU and word-edit-distance diversity")
    print("mining thresholds: BLEU >= 0.2 and diversity >= 3.4")

    show("identical", "i want a cheap restaurant .", "i want a cheap restaurant .")
    show(
        "true paraphrase (shared content, different surface)",
        "can you find me a cheap [food] restaurant in the [area] ?",
        "i am looking for a cheap [food] place located in the [area] .",
    )
    show("small edit (too similar: diversity below 3.4)",
         "i want a cheap restaurant .", "i want a cheap restaurant please .")
    show("unrelated (no shared words: BLEU is zero even with smoothing)",
         "what is the phone number ?", "goodbye and thank you very much .")

    print("\n--- corpus-level BLEU (used for response quality in evaluation) ---")
    hyps = [["the", "phone", "is", "[phone]", "."], ["it", "is", "in", "the", "[area]", "."]]
    refs = [["the", "phone", "number", "is", "[phone]", "."], ["it", "is", "in", "the", "[area]", "."]]
    print(f"  2 generated responses vs gold: {corpus_bleu(hyps, refs):.4f}")
    print("  (corpus BLEU pools n-gram counts over all segments before combining,")
    print("   and stays unsmoothed so weak responses are not inflated)")

    print("\nTakeaway: the BLEU floor keeps mined pairs on-topic, the diversity")
    print("floor keeps them from being trivial copies.")


if __name__ == "__main__":
    main()
