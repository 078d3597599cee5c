"""Random deployments at n=100: how far the large-n formula is from the truth.

Run: python3 demos/disconnectivity.py
"""

from finitewsn import RandSpec, asymptotic_disc, disc_bounds, estimate_probability

N = 100
print("link probability 0.5")
print(f"{'r':>6} {'lower':>10} {'estimate':>10} {'upper':>10} {'simulated':>10}")
for r in (0.3, 0.325, 0.35, 0.375, 0.4):
    rep = disc_bounds(RandSpec(N, r, 0.5), pair_samples=200_000)
    sim = estimate_probability(RandSpec(N, r, 0.5), "disconnected", 50_000, master_seed=2)
    print(f"{r:6.3f} {rep.lower:10.4g} {rep.estimate:10.4g} {rep.upper_truncated:10.4g} {sim.estimate:10.4g}")

print("\nreliable links: simulation against the large-n formula")
print(f"{'r':>6} {'simulated':>10} {'large-n':>10}")
for r in (0.2, 0.25, 0.3):
    sim = estimate_probability(RandSpec(N, r), "disconnected", 50_000, master_seed=3)
    print(f"{r:6.3f} {sim.estimate:10.4g} {asymptotic_disc(N, r):10.3g}")
