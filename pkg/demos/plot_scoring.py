"""
Scoring hypotheses against references
=====================================

Word error rate with the edit script behind it, the error buckets by
number size, and real-time factor.
"""

from digits_toolkit import evaluation

# the misheard "twelve six" from a general-purpose recognizer
a = evaluation.align(["twelve", "six"], ["well", "fix"])
print([op.kind.value for op in a.ops])
print(evaluation.wer(a).summary_line())

# an inserted connective costs one error
print(evaluation.score_text("six hundred fifty three", "six hundred and fifty three").summary_line())

# corpus WER sums the counts before dividing
records = [
    evaluation.ScoreRecord("u1", "two", ""),
    evaluation.ScoreRecord("u2", "sixteen", "sixty"),
    evaluation.ScoreRecord("u3", "four hundred eighty", "four hundred eighty"),
    evaluation.ScoreRecord("u4", "nine oh two one", "nine two one"),
]
print(evaluation.score_records(records).summary(), end="")

# 2.188 s to decode an hour of audio is far below real time
print(evaluation.rtf(2.188, 3646.3).summary_line())
