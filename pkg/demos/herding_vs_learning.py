"""Bounded vs unbounded private beliefs: plateau against full learning.

Runs the two baseline presets at reduced scale and prints the learning
curves side by side.  With unbounded beliefs the occasional extreme signal
keeps breaking wrong runs, so accuracy climbs toward 1; with bounded
beliefs the public belief escapes the signal range and wrong herds survive.

    python3 demos/herding_vs_learning.py
"""

from dataclasses import replace

from soclearn.engine import estimate_curve
from soclearn.presets import preset

REPS = 3000
HORIZON = 250


def downscaled(name: str):
    return replace(preset(name), replications=REPS, horizon=HORIZON)


def main() -> None:
    bounded = estimate_curve(downscaled("ex_bounded_singleton"))
    unbounded = estimate_curve(downscaled("ex_unbounded_complete"))

    print(f"{REPS} replications, horizon {HORIZON}\n")
    print(f"{'t':>5}  {'bounded p_correct':>18}  {'unbounded p_correct':>20}")
    for t in (1, 2, 5, 10, 25, 50, 100, 250):
        b = bounded.at(t)["p_correct"]
        u = unbounded.at(t)["p_correct"]
        print(f"{t:>5}  {b:>18.4f}  {u:>20.4f}")

    print()
    for label, curve in (("bounded", bounded), ("unbounded", unbounded)):
        herd = curve.herd_frequency[-1]
        wrong = curve.wrong_herd_frequency[-1]
        print(
            f"{label:>9}: herd frequency {herd:.3f}, wrong-herd frequency {wrong:.3f}, "
            f"terminal accuracy {curve.p_correct[-1]:.4f}"
        )

    drift = abs(bounded.at(HORIZON)["p_correct"] - bounded.at(HORIZON // 2)["p_correct"])
    print(f"\nbounded curve drift over the back half: {drift:.4f} (a plateau, not convergence)")


if __name__ == "__main__":
    main()
