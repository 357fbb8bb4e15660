"""Layer 1: L-system expansion with recursion tags.

The canonical two-symbol grammar (A -> AB, B -> A) grows Fibonacci-length
strings. Each output symbol carries a generation tag that later layers use
to modulate density and register.
"""

from polycanon import expand, shuffle_preserving_counts, symbol_counts
from polycanon.grammar import fibonacci
from polycanon.metrics import information_rate
from polycanon.presets import fibonacci_grammar

grammar = fibonacci_grammar()

print("depth  length  Fib(n+2)  A:B    string")
for depth in range(8):
    s = expand(grammar, depth)
    counts = symbol_counts(s)
    print(f"{depth:>5}  {len(s):>6}  {fibonacci(depth + 2):>8}  "
          f"{counts.get('A', 0)}:{counts.get('B', 0):<4} {s.text[:40]}")

s4 = expand(grammar, 4)
print("\ndepth-4 generation tags:", s4.generations)
print("bigram information rate:", round(information_rate(s4.text), 3), "bits")

shuffled = shuffle_preserving_counts(s4, seed=1)
print("\na count-preserving shuffle:", shuffled.text)
print("its information rate:", round(information_rate(shuffled.text), 3),
      "(structure gone, composition intact)")
