"""Separation motives: congestion payoffs split the community, never the truth.

With payoffs decreasing in the number of same-action peers, equilibrium
splits put the larger block on the belief-favored action.  Prints the
selected split as the public belief sweeps up, then simulates the
prop6_separation preset at reduced scale.

    python3 demos/separation_splits.py
"""

from dataclasses import replace

from soclearn.engine import estimate_curve
from soclearn.payoffs import separation_payoff
from soclearn.presets import preset
from soclearn.strategies import separation_selection

Q = 4


def main() -> None:
    payoff = separation_payoff(kappa=2.0, match_bonus=1.0)
    selection = separation_selection(payoff, Q)
    print(f"kappa=2 congestion, size {Q}: heads on the favored action by belief\n")
    print(f"{'belief':>8}  {'favored-action count':>21}")
    for p in (0.50, 0.55, 0.60, 0.75, 0.90, 0.99):
        print(f"{p:>8.2f}  {selection.count_at(p):>21}")
    print("\nat 0.6 the split is 2-2: mild evidence is not worth the crowding")

    spec = replace(preset("prop6_separation"), replications=3000, horizon=150)
    curve = estimate_curve(spec)
    print(f"\nprop6_separation at {spec.replications} reps, horizon {spec.horizon}:")
    print(f"{'t':>5}  {'p_correct':>10}")
    for t in (1, 5, 25, 75, 150):
        print(f"{t:>5}  {curve.at(t)['p_correct']:>10.4f}")
    print("\nsplits reveal the minority signal draw, but congestion caps coordination,")
    print("so accuracy settles without the unanimity herds of coordination payoffs")


if __name__ == "__main__":
    main()
