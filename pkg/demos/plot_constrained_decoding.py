"""
Forcing a transcript into the number vocabulary
===============================================

Out-of-vocabulary words are pulled to the nearest number word when they
are close enough and dropped otherwise.
"""

from digits_toolkit.constrained_decode import constrained_text, snap_to_vocab

print(snap_to_vocab("fix"))
print(snap_to_vocab("well", max_distance=3))

for radius in (1, 2, 3):
    result = constrained_text("well fix", max_distance=radius)
    print(radius, result.best, result.total_distance, result.dropped)

# already clean input passes through with zero cost
print(constrained_text("four hundred eighty"))
