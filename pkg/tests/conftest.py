from fractions import Fraction

from hypothesis import HealthCheck, settings, strategies as st

from hermig.scalars import LambdaScalar, Scalar

settings.register_profile(
    "default",
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

LAMBDAS = (Fraction(0), Fraction(1), Fraction(-1), Fraction(1, 3))

fractions = st.fractions(min_value=-5, max_value=5, max_denominator=7)
nonzero_lambdas = st.sampled_from([Fraction(1), Fraction(-1), Fraction(1, 3), Fraction(-2, 5), Fraction(3)])
lambda_modes = st.sampled_from([None, Fraction(0), Fraction(1), Fraction(-1), Fraction(1, 3)])

scalars = st.dictionaries(st.integers(-3, 3), fractions, max_size=3).map(Scalar)
lambda_scalars = st.dictionaries(
    st.tuples(st.integers(-2, 3), st.integers(-3, 3)), fractions, max_size=4
).map(LambdaScalar)
