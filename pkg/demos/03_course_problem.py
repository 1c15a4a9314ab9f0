"""Which constant course takes a curve on the torus from (0, 0) to y = 2 at x = pi?"""

import math

from rhumbforge import LoxodromeSpec, example_fixture, integrate_loxodrome, solve_course

torus = example_fixture("Ex2").surface
phi = solve_course(torus, "meridian", (0.0, 0.0), math.pi, 2.0)
curve = integrate_loxodrome(torus, LoxodromeSpec("meridian", phi, (0.0, 0.0), (0.0, math.pi)))
print(f"course angle {phi:.12f} rad")
print(f"closed form  {math.atan(math.tan(1.0) / math.pi):.12f} rad")
print(f"end point    y = {curve.v[-1]:.10f}, arc length {curve.length:.6f}")
