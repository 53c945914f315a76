import logging
from collections.abc import Sequence
from fractions import Fraction

from returns.maybe import Maybe, Nothing, Some
from returns.result import Failure, Result, Success
from z3 import ArithRef, BoolRef, ModelRef, RatNumRef, Real, RealVal, Solver, Sum, sat

logger = logging.getLogger(__name__)

Rational = Fraction | int


def rational_val(value: Rational) -> ArithRef:
    """Create an exact z3 real constant from a rational number."""
    q = Fraction(value)
    return RealVal(f"{q.numerator}/{q.denominator}")


def create_unknowns(prefix: str, count: int) -> list[ArithRef]:
    """Create z3 real unknowns named prefix0, prefix1, ..."""
    return [Real(f"{prefix}{i}") for i in range(count)]


def create_equations(
    rows: Sequence[Sequence[Rational]],
    rhs: Sequence[Rational],
    unknowns: Sequence[ArithRef],
) -> Result[list[BoolRef], str]:
    """Create the z3 equations rows @ unknowns == rhs.

    Args:
        rows: Coefficient rows, one per equation
        rhs: Right-hand side values
        unknowns: The z3 unknowns

    Returns:
        Result containing the list of equations or an error message
    """
    if len(rows) != len(rhs):
        return Failure(f"{len(rows)} equation rows but {len(rhs)} right-hand sides")
    try:
        equations = []
        for row, value in zip(rows, rhs, strict=True):
            if len(row) != len(unknowns):
                return Failure(
                    f"Row of length {len(row)} for {len(unknowns)} unknowns"
                )
            terms = [
                rational_val(coeff) * var
                for coeff, var in zip(row, unknowns, strict=True)
                if coeff != 0
            ]
            lhs = Sum(terms) if terms else rational_val(0)
            equations.append(lhs == rational_val(value))
        return Success(equations)
    except Exception as e:
        return Failure(f"Error creating equations: {e!s}")


def get_rational(model: ModelRef, var: ArithRef) -> Maybe[Fraction]:
    """Read an exact rational value out of a z3 model.

    Args:
        model: The z3 model
        var: The z3 unknown

    Returns:
        Maybe containing the value, Nothing when the model leaves it free
    """
    try:
        value = model[var]
        if value is None:
            return Nothing
        match value:
            case RatNumRef():
                return Some(value.as_fraction())
            case _:
                # Parse rational numbers like "5/2"
                return Some(Fraction(str(value)))
    except Exception:
        return Nothing


def solve_linear_system(
    rows: Sequence[Sequence[Rational]],
    rhs: Sequence[Rational],
    prefix: str = "x",
) -> Result[list[Fraction], str]:
    """Solve rows @ x == rhs exactly over the rationals.

    Free unknowns (if the system is underdetermined) are reported as 0.

    Args:
        rows: Coefficient rows, one per equation
        rhs: Right-hand side values
        prefix: Name prefix for the z3 unknowns

    Returns:
        Result containing the solution or an error message when inconsistent
    """
    count = len(rows[0]) if rows else 0
    unknowns = create_unknowns(prefix, count)
    equations_result = create_equations(rows, rhs, unknowns)
    if isinstance(equations_result, Failure):
        return equations_result
    equations = equations_result.unwrap()
    try:
        solver = Solver()
        solver.add(equations)
        if solver.check() != sat:
            return Failure("Linear system has no rational solution")
        model = solver.model()
        return Success([
            get_rational(model, var).value_or(Fraction(0)) for var in unknowns
        ])
    except Exception as e:
        return Failure(f"Error solving linear system: {e!s}")
