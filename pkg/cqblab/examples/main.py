#!/usr/bin/env python3
"""
cqblab - Worked examples

Walks through the flag manifold SU(3)/T, the Kahler-Einstein space
SU(6)/S(U(2)xU(2)xU(2)), the negatively curved Mostow-Siu model and a short
reaction-ODE run, printing the verdicts each one produces.
"""
from returns.result import Failure, Success

from cqblab.cli.main import space_tensor
from cqblab.core.cspace import describe_metric
from cqblab.core.curvature import constant_holomorphic_curvature, mostow_siu_model
from cqblab.core.flow import default_constants, integrate
from cqblab.core.positivity import form_report, ke_shortcut
from cqblab.core.rank import rank1_check
from cqblab.models.curvature import CurvatureTensor, MostowSiuParams
from cqblab.models.positivity import Mode


def show_forms(R: CurvatureTensor) -> None:
    for mode in (Mode.CQB, Mode.DCQB):
        match form_report(R, mode):
            case Success(report):
                print(
                    f"  {mode.value:5s} min {report.min_value:+.6f}"
                    f"  max {report.max_value:+.6f}  -> {report.verdict.value}"
                )
            case Failure(error):
                print(f"  {mode.value}: {error}")


def main() -> None:
    """Run the worked examples."""
    print("cqblab - curvature positivity of Kahler C-spaces")
    print("=" * 50)

    print("\nExample 1: flag manifold SU(3)/T with g = (1, 1, 2)")
    print("-" * 30)
    match space_tensor("A", 2, [1, 2], "c=1,1"):
        case Success(flag):
            print(f"  metric: {describe_metric(flag.metric)['g']}")
            show_forms(flag.tensor)
            rank1 = rank1_check(flag.tensor, Mode.CQB)
            print(f"  rank-one CQB min {rank1.min_value:+.6f}")
        case Failure(error):
            print(f"  error: {error}")

    print("\nExample 2: SU(6)/S(U(2)xU(2)xU(2)) with its Kahler-Einstein metric")
    print("-" * 30)
    match space_tensor("A", 5, [2, 4], "ke"):
        case Success(a5):
            print(f"  c = {describe_metric(a5.metric)['c']}, n = {a5.space.n}")
            shortcut = ke_shortcut(a5.tensor)
            print(
                f"  mu = {shortcut.mu}, lambda_1 = {shortcut.lambda1:.6f},"
                f" lambda_N = {shortcut.lambdaN:.6f}"
            )
            show_forms(a5.tensor)
        case Failure(error):
            print(f"  error: {error}")

    print("\nExample 3: Mostow-Siu model, n=2, b=2, c=1, e=2")
    print("-" * 30)
    params = MostowSiuParams(n=2, b=2, c=1, e=2)
    print(f"  n b e > (n-1)^2 c^2: {params.negative_regime}")
    show_forms(mostow_siu_model(params))

    print("\nExample 4: reaction ODE from constant curvature 1 in dimension 1")
    print("-" * 30)
    R0 = constant_holomorphic_curvature(1, 1.0)
    match integrate(R0, default_constants(R0), 0.5, 1e-3, monitor_every=0):
        case Success(trajectory):
            k = trajectory.final.tensor.component(0, 0, 0, 0).real
            print(f"  k(0.5) = {k:.9f} (closed form 2)")
        case Failure(error):
            print(f"  error: {error}")


if __name__ == "__main__":
    main()
