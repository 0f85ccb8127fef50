"""Regenerate crates/core/tests/fixtures/vader_golden.tsv.

Scores each sentence with the reference vaderSentiment package and writes the
unrounded compound/pos/neg/neu values (the package rounds its public output).

    pip install vaderSentiment==3.3.2
    python3 tools/gen_vader_golden.py
"""
import math
import os

from vaderSentiment.vaderSentiment import SentimentIntensityAnalyzer, normalize

SENTENCES = [
    "VADER is smart, handsome, and funny.",
    "VADER is smart, handsome, and funny!",
    "VADER is very smart, handsome, and funny.",
    "VADER is VERY SMART, handsome, and FUNNY.",
    "VADER is VERY SMART, handsome, and FUNNY!!!",
    "VADER is not smart, handsome, nor funny.",
    "At least it isn't a horrible book.",
    "The book was only kind of good.",
    "The plot was good, but the characters are uncompelling and the dialog is not great.",
    "Today SUX!",
    "Today only kinda sux! But I'll get by, lol",
    "Not bad at all",
    "Sentiment analysis has never been good.",
    "Sentiment analysis has never been this good!",
    "With VADER, sentiment analysis is the shit!",
    "Without a doubt, excellent idea.",
    "Roger Dodger is one of the least compelling variations on this theme.",
    "no good deed goes unpunished",
    "stay home stay safe everyone",
    "covid cases are rising again in georgia this is terrible",
    "so grateful for the nurses and doctors fighting corona",
    "i tested covid19 positive and i am scared",
    "the new covid testing site is open today",
    "cases rising but people are still not wearing masks",
    "",
]


class Unrounded(SentimentIntensityAnalyzer):
    def score_valence(self, sentiments, text):
        if not sentiments:
            return {"compound": 0.0, "pos": 0.0, "neg": 0.0, "neu": 0.0}
        sum_s = float(sum(sentiments))
        amp = self._punctuation_emphasis(text)
        if sum_s > 0:
            sum_s += amp
        elif sum_s < 0:
            sum_s -= amp
        compound = normalize(sum_s)
        pos_sum, neg_sum, neu_count = self._sift_sentiment_scores(sentiments)
        if pos_sum > math.fabs(neg_sum):
            pos_sum += amp
        elif pos_sum < math.fabs(neg_sum):
            neg_sum -= amp
        total = pos_sum + math.fabs(neg_sum) + neu_count
        return {
            "compound": compound,
            "pos": math.fabs(pos_sum / total),
            "neg": math.fabs(neg_sum / total),
            "neu": math.fabs(neu_count / total),
        }


def main():
    analyzer = Unrounded()
    out = os.path.join(os.path.dirname(__file__), "..", "crates", "core", "tests", "fixtures", "vader_golden.tsv")
    with open(out, "w", encoding="utf-8") as f:
        f.write("text\tcompound\tpos\tneg\tneu\n")
        for s in SENTENCES:
            r = analyzer.polarity_scores(s)
            f.write("%s\t%r\t%r\t%r\t%r\n" % (s, r["compound"], r["pos"], r["neg"], r["neu"]))


if __name__ == "__main__":
    main()
