"""Theorem 1 cutoff equilibrium: conformity rescues learning from the herd.

Walks through the ingredients — the conformity threshold, the equal-mass
signal cutoffs, and the belief-ratio contraction they induce — then runs
the thm1_bounded preset at reduced scale to show observation stays
truthful even though everyone coordinates.

    python3 demos/conformity_cutoffs.py
"""

from dataclasses import replace

from soclearn.beliefs import belief_step_bounds, cutoff_pair, reversal_horizon
from soclearn.engine import estimate_curve
from soclearn.payoffs import conformity_threshold, linear_payoff
from soclearn.presets import preset
from soclearn.signals import BoundedMixture, SignalStructure

EPSILON = 0.05


def main() -> None:
    payoff = linear_payoff()
    qhat = conformity_threshold(payoff)
    print(f"conformity threshold: unanimity matches going it alone from size {qhat} up")
    print(f"  u(1,0,{qhat}) = {payoff.utility(1, 0, qhat)}  vs  u(1,1,1) = {payoff.utility(1, 1, 1)}\n")

    structure = SignalStructure(BoundedMixture(0.5))
    s0, s1 = cutoff_pair(structure, qhat, EPSILON)
    print(f"equal-mass cutoffs at eps={EPSILON}: s0={s0:+.4f}, s1={s1:+.4f}")
    print(f"  middle signals carry mass {1 - 2 * EPSILON:.2f} under both states,")
    print("  so a middle signal is uninformative and coordinating on it is safe\n")

    bounds = belief_step_bounds(structure, qhat, EPSILON)
    print(f"tail steps contract the belief ratio by y={bounds.ratio_bound:.4f} per reversal")
    print(f"  and the wrong state survives a reversal with chance at most w={bounds.floor:.4f}")
    print(
        "  a 3:1 wrong public belief is undone by "
        f"{reversal_horizon(0.75, 0.5, bounds.ratio_bound)} reversals\n"
    )

    spec = replace(preset("thm1_bounded"), replications=3000, horizon=250)
    curve = estimate_curve(spec)
    print(f"thm1_bounded at {spec.replications} reps, horizon {spec.horizon}:")
    print(f"{'t':>5}  {'p_correct':>10}  {'p_truthtell_given_obs':>22}")
    for t in (2, 10, 50, 100, 250):
        row = curve.at(t)
        print(f"{t:>5}  {row['p_correct']:>10.4f}  {row['p_truthtell_given_obs']:>22.4f}")
    print("\ncoordination drives both toward 1: the herd carries the truth with it")


if __name__ == "__main__":
    main()
