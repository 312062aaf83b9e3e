"""
Spoken forms of a digit string
==============================

Every way a short digit string can be read aloud, and the trip back.
"""

from digits_toolkit import grammar
from digits_toolkit.grammar import ParsePolicy

# all readings of 653, in generation order
for seq in grammar.sorted_verbalizations("653"):
    print(grammar.to_text(seq))

# the space grows quickly with length and zeros
for d in ("7", "10", "480", "2005", "90210"):
    print(d, len(grammar.verbalizations(d)))

# shortest readings: one per style
print(grammar.to_text(grammar.canonical_verbalization("1998", "compact")))
print(grammar.to_text(grammar.canonical_verbalization("1998", "digit_by_digit")))

# parsing is ambiguous without a length hint ...
seq = grammar.tokenize("one twenty three")
print(grammar.parse(seq))
# ... and a known length (say a 4-digit PIN) settles it
print(grammar.parse(seq, ParsePolicy(expected_length=4)))
