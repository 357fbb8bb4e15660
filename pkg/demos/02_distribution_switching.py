"""Layers 2-3: symbols select distribution *types*, then voices render them.

Symbol A maps to a deterministic regime (constant IOI across a 3:4 canon,
diatonic registers, fixed velocity); symbol B maps to a textural one
(exponential IOI across 1:2 voices, chromatic register, wide velocities).
The full render alternates sharply between the two sound worlds.
"""

import numpy as np

from polycanon import expand, generate, make_rng
from polycanon.mapping import describe, resolve
from polycanon.presets import canonical_table, fibonacci_grammar

table = canonical_table()
print(describe(table)[:400], "...\n")

for symbol in ("A", "B"):
    cfg = resolve(table, symbol, 0)
    print(f"symbol {symbol}: IOI {type(cfg.ioi).__name__}, ratios {cfg.ratios}, "
          f"velocity {type(cfg.velocity).__name__}, section {cfg.duration}s")

symbols = expand(fibonacci_grammar(), 4)
piece = generate(symbols, table, make_rng(42), seed=42)
print(f"\nrendered {len(piece)} events over {piece.duration_span():.0f} s")

onsets = piece.onsets()
print("\nsection  symbol  span          density (notes/s)")
for index, (symbol, lo, hi) in enumerate(piece.sections):
    n = np.sum((onsets >= lo) & (onsets < hi))
    print(f"{index:>7}  {symbol:>6}  [{lo:5.1f}, {hi:5.1f})  {n / (hi - lo):8.1f}")

# depth modulation: the same symbol gets denser and wider deeper in the tree
weighted = canonical_table(depth_weighted=True)
print("\nmean IOI of symbol B by generation (depth-weighted table):")
for g in range(4):
    print(f"  g={g}: {resolve(weighted, 'B', g).ioi.mean() * 1000:.2f} ms")
