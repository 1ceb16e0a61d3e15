"""A first simulation: 250 agents on a complete graph reaching consensus.

With a wide confidence bound (epsilon = 1.0) and no selection bias
(gamma = 0) every interaction succeeds and the population collapses onto a
single opinion; the trace shows the participation ratio C dropping to 1 and
the dispersion dropping to 0.
"""

from biasnet import InitSpec, ModelParams, generate_complete, run

graph = generate_complete(250)
params = ModelParams(epsilon=1.0, gamma=0.0, mu=0.5)
result = run(graph, InitSpec(variant="uniform"), params, seed=42)

print(f"converged: {result.converged} after {result.iterations_used} iterations")
print(f"{'iter':>6} {'C':>8} {'dispersion':>10}")
for iteration, c, dist in result.trace:
    print(f"{iteration:>6} {c:>8.3f} {dist:>10.4f}")

final = result.final_opinions
print(f"\nfinal opinions: min {final.min():.6f}, max {final.max():.6f}")
